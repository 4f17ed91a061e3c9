#include "growthcast/datamodel.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_map>

#include "json.hpp"

#include "growthcast/csv.hpp"
#include "growthcast/num.hpp"

namespace growthcast {

namespace {

const std::vector<std::string> kRecordColumns = {
    "image_path", "plot_id", "stage", "easting_m", "northing_m", "treatment", "split"};

std::filesystem::path resolve_manifest_dir(const std::filesystem::path& path) {
    if (std::filesystem::is_directory(path)) return path;
    if (path.filename() == "pairs.jsonl") return path.parent_path();
    throw DataError("manifest path must be a directory or a pairs.jsonl file: " + path.string());
}

}  // namespace

void validate_record(const ImageRecord& r, const std::string& where) {
    if (r.image_path.empty()) throw DataError(where + ": empty image_path");
    if (r.stage < 0) throw DataError(where + ": stage must be >= 0");
    if (!std::isfinite(r.easting_m) || !std::isfinite(r.northing_m))
        throw DataError(where + ": non-finite coordinates");
}

void validate_pair(const ImagePair& p, const std::string& where) {
    validate_record(p.input, where + " (input)");
    validate_record(p.reference, where + " (reference)");
    if (p.horizon <= 0) throw DataError(where + ": horizon must be > 0");
    if (p.reference.stage - p.input.stage != p.horizon)
        throw DataError(where + ": reference.stage - input.stage != horizon (" +
                        std::to_string(p.reference.stage) + " - " + std::to_string(p.input.stage) +
                        " != " + std::to_string(p.horizon) + ")");
    if (p.input.plot_id != p.reference.plot_id)
        throw DataError(where + ": input and reference belong to different plots");
}

void validate_manifest(const PairManifest& m) {
    std::set<std::pair<std::string, std::string>> seen;
    bool any_none = false, any_design = false;
    for (size_t i = 0; i < m.pairs.size(); ++i) {
        const auto& p = m.pairs[i];
        std::string where = "pair " + p.input.image_path + " -> " + p.reference.image_path;
        validate_pair(p, where);
        if (p.horizon != m.horizon)
            throw DataError(where + ": horizon " + std::to_string(p.horizon) +
                            " differs from manifest horizon " + std::to_string(m.horizon));
        if (!seen.insert({p.input.image_path, p.reference.image_path}).second)
            throw DataError(where + ": duplicate pair entry");
        for (const auto* r : {&p.input, &p.reference}) {
            (r->treatment == Treatment::None ? any_none : any_design) = true;
        }
    }
    if (any_none && any_design)
        throw DataError("manifest mixes treatment 'none' with a treatment design");
    if (m.distance_threshold_m <= 0) throw DataError("distance_threshold_m must be > 0");
}

std::vector<ImageRecord> load_records_csv(const std::filesystem::path& path) {
    csv::Table table = csv::read_file(path);
    if (table.header != kRecordColumns) {
        throw DataError(path.string() + ": header must be exactly '" +
                        csv::join_row(kRecordColumns) + "'");
    }
    std::vector<ImageRecord> records;
    records.reserve(table.rows.size());
    for (size_t i = 0; i < table.rows.size(); ++i) {
        const auto& row = table.rows[i];
        std::string where = path.string() + " row " + std::to_string(i + 2);
        ImageRecord r;
        r.image_path = row[0];
        r.plot_id = row[1];
        r.stage = int(parse_long(row[2], where + " column stage"));
        r.easting_m = parse_double(row[3], where + " column easting_m");
        r.northing_m = parse_double(row[4], where + " column northing_m");
        try {
            r.treatment = treatment_from_string(row[5]);
            r.split = split_from_string(row[6]);
        } catch (const DataError& e) {
            throw DataError(where + ": " + e.what());
        }
        validate_record(r, where);
        records.push_back(std::move(r));
    }
    return records;
}

void save_records_csv(const std::vector<ImageRecord>& records,
                      const std::filesystem::path& path) {
    csv::Table table;
    table.header = kRecordColumns;
    for (const auto& r : records) {
        table.rows.push_back({r.image_path, r.plot_id, std::to_string(r.stage),
                              format_double(r.easting_m), format_double(r.northing_m),
                              to_string(r.treatment), to_string(r.split)});
    }
    csv::write_file(path, table);
}

PairManifest load_manifest(const std::filesystem::path& path) {
    auto dir = resolve_manifest_dir(path);
    auto records = load_records_csv(dir / "records.csv");
    std::unordered_map<std::string, const ImageRecord*> by_path;
    for (const auto& r : records) by_path[r.image_path] = &r;

    std::ifstream in(dir / "pairs.jsonl");
    if (!in) throw DataError("cannot open " + (dir / "pairs.jsonl").string());

    PairManifest m;
    std::string line;
    size_t lineno = 0;
    bool first = true;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::string where = (dir / "pairs.jsonl").string() + ":" + std::to_string(lineno);
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw DataError(where + ": " + e.what());
        }
        if (!j.contains("input") || !j.contains("reference") || !j.contains("horizon"))
            throw DataError(where + ": pair line needs input, reference, horizon");
        ImagePair p;
        std::string in_path = j.at("input").get<std::string>();
        std::string ref_path = j.at("reference").get<std::string>();
        p.horizon = j.at("horizon").get<int>();
        auto in_it = by_path.find(in_path);
        auto ref_it = by_path.find(ref_path);
        if (in_it == by_path.end()) throw DataError(where + ": unknown record '" + in_path + "'");
        if (ref_it == by_path.end())
            throw DataError(where + ": unknown record '" + ref_path + "'");
        p.input = *in_it->second;
        p.reference = *ref_it->second;
        if (first) {
            m.horizon = p.horizon;
            first = false;
        }
        m.pairs.push_back(std::move(p));
    }
    validate_manifest(m);
    return m;
}

void save_manifest(const PairManifest& manifest, const std::filesystem::path& dir) {
    validate_manifest(manifest);
    std::filesystem::create_directories(dir);

    // records.csv carries each referenced record once, in pair order.
    std::vector<ImageRecord> records;
    std::set<std::string> seen;
    for (const auto& p : manifest.pairs) {
        for (const auto* r : {&p.input, &p.reference}) {
            if (seen.insert(r->image_path).second) records.push_back(*r);
        }
    }
    save_records_csv(records, dir / "records.csv");

    std::ofstream out(dir / "pairs.jsonl", std::ios::binary);
    if (!out) throw DataError("cannot write " + (dir / "pairs.jsonl").string());
    for (const auto& p : manifest.pairs) {
        nlohmann::ordered_json j;
        j["input"] = p.input.image_path;
        j["reference"] = p.reference.image_path;
        j["horizon"] = p.horizon;
        out << j.dump() << '\n';
    }
    if (!out) throw DataError("write failed: " + (dir / "pairs.jsonl").string());
}

long CountTable::total() const {
    long n = 0;
    for (const auto& [k, v] : cells) n += v;
    return n;
}

long CountTable::transition_total(int from_stage, int to_stage) const {
    long n = 0;
    for (const auto& [k, v] : cells)
        if (k.from_stage == from_stage && k.to_stage == to_stage) n += v;
    return n;
}

std::string CountTable::to_text() const {
    std::set<std::pair<int, int>> transitions;
    for (const auto& [k, v] : cells) transitions.insert({k.from_stage, k.to_stage});
    std::ostringstream os;
    os << "transition";
    for (Treatment t : kAllTreatments) os << '\t' << to_string(t);
    os << "\tnone\tsum\n";
    for (auto [from, to] : transitions) {
        os << from << "->" << to;
        for (Treatment t : {Treatment::IpFp, Treatment::IpFm, Treatment::ImFp, Treatment::ImFm,
                            Treatment::None}) {
            auto it = cells.find(Key{from, to, t});
            os << '\t' << (it == cells.end() ? 0 : it->second);
        }
        os << '\t' << transition_total(from, to) << '\n';
    }
    os << "total\t" << total() << '\n';
    return os.str();
}

CountTable manifest_counts(const PairManifest& manifest) {
    CountTable table;
    for (const auto& p : manifest.pairs) {
        CountTable::Key key{p.input.stage, p.reference.stage, p.input.treatment};
        ++table.cells[key];
    }
    return table;
}

}  // namespace growthcast
