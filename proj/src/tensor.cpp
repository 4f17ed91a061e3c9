#include "growthcast/tensor.hpp"

#include <algorithm>
#include <cstring>

namespace growthcast {

void validate_image_tensor(const Tensor& t, const std::string& what) {
    if (t.channels() != 3)
        throw DataError(what + ": expected 3 channels, got " + std::to_string(t.channels()));
    if (t.height() <= 0 || t.width() <= 0) throw DataError(what + ": non-positive dimensions");
    for (std::size_t i = 0; i < t.size(); ++i) {
        double v = t.data()[i];
        if (!(v >= -1.0 && v <= 1.0))
            throw DataError(what + ": value out of [-1, 1] range");
    }
}

Tensor concat_channels(const Tensor& a, const Tensor& b) {
    assert(a.height() == b.height() && a.width() == b.width());
    Tensor out(a.channels() + b.channels(), a.height(), a.width());
    std::size_t plane = std::size_t(a.height()) * a.width();
    std::memcpy(out.data(), a.data(), a.channels() * plane * sizeof(double));
    std::memcpy(out.data() + a.channels() * plane, b.data(), b.channels() * plane * sizeof(double));
    return out;
}

}  // namespace growthcast
