#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace growthcast {

// Error hierarchy; the CLI maps each class to a distinct exit code.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ConfigError : Error {
    using Error::Error;
};
struct DataError : Error {
    using Error::Error;
};
struct NumericError : Error {
    using Error::Error;
};
struct BackendError : Error {
    using Error::Error;
};

enum class Treatment { IpFp, IpFm, ImFp, ImFm, None };
enum class Split { Train, Test };

inline std::string to_string(Treatment t) {
    switch (t) {
        case Treatment::IpFp: return "i+f+";
        case Treatment::IpFm: return "i+f-";
        case Treatment::ImFp: return "i-f+";
        case Treatment::ImFm: return "i-f-";
        case Treatment::None: return "none";
    }
    throw ConfigError("invalid treatment value");
}

inline Treatment treatment_from_string(std::string_view s) {
    if (s == "i+f+") return Treatment::IpFp;
    if (s == "i+f-") return Treatment::IpFm;
    if (s == "i-f+") return Treatment::ImFp;
    if (s == "i-f-") return Treatment::ImFm;
    if (s == "none") return Treatment::None;
    throw DataError("unknown treatment: '" + std::string(s) + "'");
}

inline constexpr Treatment kAllTreatments[] = {Treatment::IpFp, Treatment::IpFm,
                                               Treatment::ImFp, Treatment::ImFm};

inline std::string to_string(Split s) {
    return s == Split::Train ? "train" : "test";
}

inline Split split_from_string(std::string_view s) {
    if (s == "train") return Split::Train;
    if (s == "test") return Split::Test;
    throw DataError("unknown split: '" + std::string(s) + "'");
}

}  // namespace growthcast
