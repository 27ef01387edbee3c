#pragma once

// JSON file formats (format_version 1).
//
// Matrix:       [[ [re, im], ... ], ...]   rows of [re, im] pairs
// ChannelFile:  {"format_version": 1, "dims": [n1, n2], "representation": "kraus" | "choi" | "stinespring",
//                "payload": ...}
//   kraus        payload = [Matrix, ...]                  each n2 x n1
//   choi         payload = Matrix                         (n1 n2) x (n1 n2), unnormalized
//   stinespring  payload = {"ancilla_dim": na, "output_partition": [n2, no],
//                           "unitary": Matrix, "ancilla_state": Matrix, "projector": Matrix}
// ExperimentFile: {"format_version": 1,
//                  "channel": ChannelFile | {"name": ..., "params": [...], "dims": [n1, n2]},
//                  "config": {"shots": N | "exact", "seed": S, "input_kind": "max_entangled" | "schmidt",
//                             "schmidt": {"alpha": [...], "U": Matrix, "V": Matrix},
//                             "kraus_threshold": t, "psd_projection": bool}}

#include <fstream>
#include <sstream>
#include <string>
#include <variant>

#include "json.hpp"

#include "choiforge/channels.hpp"
#include "choiforge/metrics.hpp"
#include "choiforge/tomography.hpp"
#include "choiforge/zoo.hpp"

namespace choiforge::io {

using Json = nlohmann::ordered_json;

inline constexpr int format_version = 1;

using AnyChannel = std::variant<KrausSet, ChoiMatrix, StinespringModel>;

inline Error parse_error(const std::string& where, const std::string& what) {
    return Error(ErrorKind::parse, where.empty() ? what : where + ": " + what);
}

// ---------------------------------------------------------------------------
// Matrices
// ---------------------------------------------------------------------------

inline Json matrix_to_json(const ComplexMatrix& m) {
    Json rows = Json::array();
    for (std::size_t r = 0; r < m.rows(); ++r) {
        Json row = Json::array();
        for (std::size_t c = 0; c < m.cols(); ++c) row.push_back(Json::array({m(r, c).real(), m(r, c).imag()}));
        rows.push_back(std::move(row));
    }
    return rows;
}

inline double number_from_json(const Json& j, const std::string& where) {
    if (!j.is_number()) throw parse_error(where, "expected a number, got " + std::string(j.type_name()));
    return j.get<double>();
}

inline ComplexMatrix matrix_from_json(const Json& j, const std::string& where) {
    if (!j.is_array() || j.empty()) throw parse_error(where, "expected a nonempty array of rows");
    const std::size_t rows = j.size();
    std::size_t cols = 0;
    std::vector<cplx> entries;
    for (std::size_t r = 0; r < rows; ++r) {
        const auto& row = j[r];
        const auto row_where = where + "[" + std::to_string(r) + "]";
        if (!row.is_array() || row.empty()) throw parse_error(row_where, "expected a nonempty row array");
        if (r == 0) cols = row.size();
        if (row.size() != cols) {
            throw parse_error(row_where, "row has " + std::to_string(row.size()) + " entries, expected " +
                                             std::to_string(cols));
        }
        for (std::size_t c = 0; c < cols; ++c) {
            const auto& z = row[c];
            const auto z_where = row_where + "[" + std::to_string(c) + "]";
            if (!z.is_array() || z.size() != 2) throw parse_error(z_where, "expected a [re, im] pair");
            entries.emplace_back(number_from_json(z[0], z_where + "[0]"), number_from_json(z[1], z_where + "[1]"));
        }
    }
    try {
        return ComplexMatrix(rows, cols, std::move(entries));
    } catch (const Error& e) {
        throw parse_error(where, e.what());
    }
}

// ---------------------------------------------------------------------------
// Channel files
// ---------------------------------------------------------------------------

inline std::pair<std::size_t, std::size_t> channel_dims(const AnyChannel& ch) {
    return std::visit(
        [](const auto& c) -> std::pair<std::size_t, std::size_t> {
            using T = std::decay_t<decltype(c)>;
            if constexpr (std::is_same_v<T, StinespringModel>) {
                return {c.system_dim(), c.output_dim()};
            } else {
                return {c.input_dim(), c.output_dim()};
            }
        },
        ch);
}

inline ChoiMatrix to_choi(const AnyChannel& ch) {
    if (const auto* k = std::get_if<KrausSet>(&ch)) return kraus_to_choi(*k);
    if (const auto* j = std::get_if<ChoiMatrix>(&ch)) return *j;
    return stinespring_to_choi(std::get<StinespringModel>(ch));
}

inline KrausSet to_kraus(const AnyChannel& ch, double threshold = tolerance::kraus_drop) {
    if (const auto* k = std::get_if<KrausSet>(&ch)) return *k;
    return choi_to_kraus(to_choi(ch), threshold);
}

inline OpaqueChannel to_opaque(const AnyChannel& ch) {
    if (const auto* k = std::get_if<KrausSet>(&ch)) return OpaqueChannel::from_kraus(*k);
    if (const auto* j = std::get_if<ChoiMatrix>(&ch)) return OpaqueChannel::from_choi(*j);
    return OpaqueChannel::from_stinespring(std::get<StinespringModel>(ch));
}

inline Json channel_to_json(const AnyChannel& ch) {
    const auto [n1, n2] = channel_dims(ch);
    Json j;
    j["format_version"] = format_version;
    j["dims"] = Json::array({n1, n2});
    if (const auto* k = std::get_if<KrausSet>(&ch)) {
        j["representation"] = "kraus";
        Json ops = Json::array();
        for (const auto& a : k->operators()) ops.push_back(matrix_to_json(a));
        j["payload"] = std::move(ops);
    } else if (const auto* c = std::get_if<ChoiMatrix>(&ch)) {
        j["representation"] = "choi";
        j["payload"] = matrix_to_json(c->matrix());
    } else {
        const auto& s = std::get<StinespringModel>(ch);
        j["representation"] = "stinespring";
        Json p;
        p["ancilla_dim"] = s.ancilla_dim();
        p["output_partition"] = Json::array({s.output_dim(), s.discard_dim()});
        p["unitary"] = matrix_to_json(s.unitary());
        p["ancilla_state"] = matrix_to_json(s.ancilla_state());
        p["projector"] = matrix_to_json(s.projector());
        j["payload"] = std::move(p);
    }
    return j;
}

inline std::size_t dim_from_json(const Json& j, const std::string& where) {
    if (!j.is_number_integer() || j.get<long long>() < 1) throw parse_error(where, "expected a positive integer");
    return j.get<std::size_t>();
}

inline std::pair<std::size_t, std::size_t> dims_from_json(const Json& j, const std::string& where) {
    if (!j.is_array() || j.size() != 2) throw parse_error(where, "expected [n1, n2]");
    return {dim_from_json(j[0], where + "[0]"), dim_from_json(j[1], where + "[1]")};
}

inline const Json& require_field(const Json& j, const char* key, const std::string& where) {
    if (!j.is_object()) throw parse_error(where, "expected an object");
    const auto it = j.find(key);
    if (it == j.end()) throw parse_error(where, std::string("missing field '") + key + "'");
    return *it;
}

inline AnyChannel channel_from_json(const Json& j, const std::string& where = "") {
    const auto field = [&](const char* key) { return where.empty() ? std::string(key) : where + "." + key; };
    const auto& version = require_field(j, "format_version", where);
    if (!version.is_number_integer() || version.get<int>() != format_version) {
        throw parse_error(field("format_version"), "unsupported format version, expected 1");
    }
    const auto [n1, n2] = dims_from_json(require_field(j, "dims", where), field("dims"));
    const auto& rep = require_field(j, "representation", where);
    if (!rep.is_string()) throw parse_error(field("representation"), "expected a string");
    const auto& payload = require_field(j, "payload", where);
    const auto kind = rep.get<std::string>();
    try {
        if (kind == "kraus") {
            if (!payload.is_array()) throw parse_error(field("payload"), "expected an array of matrices");
            std::vector<ComplexMatrix> ops;
            for (std::size_t k = 0; k < payload.size(); ++k)
                ops.push_back(matrix_from_json(payload[k], field("payload") + "[" + std::to_string(k) + "]"));
            return KrausSet(n1, n2, std::move(ops));
        }
        if (kind == "choi") return ChoiMatrix(n1, n2, matrix_from_json(payload, field("payload")));
        if (kind == "stinespring") {
            const auto pw = field("payload");
            const auto na = dim_from_json(require_field(payload, "ancilla_dim", pw), pw + ".ancilla_dim");
            const auto [out2, no] =
                dims_from_json(require_field(payload, "output_partition", pw), pw + ".output_partition");
            if (out2 != n2) throw parse_error(pw + ".output_partition", "first factor must equal dims[1]");
            return StinespringModel(n1, na, matrix_from_json(require_field(payload, "unitary", pw), pw + ".unitary"),
                                    matrix_from_json(require_field(payload, "ancilla_state", pw), pw + ".ancilla_state"),
                                    out2, no, matrix_from_json(require_field(payload, "projector", pw), pw + ".projector"));
        }
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::parse) throw;
        throw parse_error(field("payload"), e.what());
    }
    throw parse_error(field("representation"), "unknown representation '" + kind + "' (expected kraus, choi or stinespring)");
}

inline Json parse_json_text(const std::string& text, const std::string& source) {
    try {
        return Json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw parse_error(source, e.what());
    }
}

inline Json read_json_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw parse_error(path, "cannot open file");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_json_text(buf.str(), path);
}

inline std::string dump(const Json& j) { return j.dump(2) + "\n"; }

inline void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::invalid_argument, "cannot open '" + path + "' for writing");
    out << text;
}

// ---------------------------------------------------------------------------
// Experiments
// ---------------------------------------------------------------------------

struct ZooSpec {
    std::string name;
    std::vector<double> params;
    std::size_t input_dim = 2;
    std::size_t output_dim = 2;
};

inline Json zoo_spec_to_json(const ZooSpec& z) {
    Json j;
    j["name"] = z.name;
    j["params"] = z.params;
    j["dims"] = Json::array({z.input_dim, z.output_dim});
    return j;
}

struct Experiment {
    AnyChannel channel;
    TomographyConfig config;
};

inline TomographyConfig config_from_json(const Json& j, std::size_t n1, const std::string& where) {
    TomographyConfig cfg;
    const auto& shots = require_field(j, "shots", where);
    if (shots.is_string() && shots.get<std::string>() == "exact") {
        cfg.shots = ShotBudget::exact();
    } else if (shots.is_number_unsigned() && shots.get<std::uint64_t>() > 0) {
        cfg.shots = ShotBudget::finite(shots.get<std::uint64_t>());
    } else {
        throw Error(ErrorKind::config, where + ".shots: expected a positive integer or \"exact\"");
    }
    if (const auto it = j.find("seed"); it != j.end()) {
        if (!it->is_number_unsigned()) throw parse_error(where + ".seed", "expected a nonnegative integer");
        cfg.seed = it->get<std::uint64_t>();
    }
    if (const auto it = j.find("kraus_threshold"); it != j.end() && !it->is_null()) {
        cfg.kraus_threshold = number_from_json(*it, where + ".kraus_threshold");
        if (*cfg.kraus_threshold < 0.0) throw Error(ErrorKind::config, where + ".kraus_threshold: must be >= 0");
    }
    if (const auto it = j.find("psd_projection"); it != j.end()) {
        if (!it->is_boolean()) throw parse_error(where + ".psd_projection", "expected a boolean");
        cfg.psd_projection = it->get<bool>();
    }
    std::string kind = "max_entangled";
    if (const auto it = j.find("input_kind"); it != j.end()) {
        if (!it->is_string()) throw parse_error(where + ".input_kind", "expected a string");
        kind = it->get<std::string>();
    }
    if (kind == "schmidt") {
        const auto sw = where + ".schmidt";
        const auto& s = require_field(j, "schmidt", where);
        const auto& alpha = require_field(s, "alpha", sw);
        if (!alpha.is_array()) throw parse_error(sw + ".alpha", "expected an array of numbers");
        SchmidtInput input;
        for (std::size_t i = 0; i < alpha.size(); ++i)
            input.alpha.push_back(number_from_json(alpha[i], sw + ".alpha[" + std::to_string(i) + "]"));
        input.reference_unitary = matrix_from_json(require_field(s, "U", sw), sw + ".U");
        input.system_unitary = matrix_from_json(require_field(s, "V", sw), sw + ".V");
        validate_schmidt_input(input, n1);
        cfg.input = std::move(input);
    } else if (kind != "max_entangled") {
        throw parse_error(where + ".input_kind", "expected \"max_entangled\" or \"schmidt\"");
    }
    return cfg;
}

inline Experiment experiment_from_json(const Json& j) {
    const auto& version = require_field(j, "format_version", "");
    if (!version.is_number_integer() || version.get<int>() != format_version) {
        throw parse_error("format_version", "unsupported format version, expected 1");
    }
    const auto& ch = require_field(j, "channel", "");
    Experiment e;
    if (ch.is_object() && ch.contains("name")) {
        const auto& name = ch["name"];
        if (!name.is_string()) throw parse_error("channel.name", "expected a string");
        std::vector<double> params;
        if (const auto it = ch.find("params"); it != ch.end()) {
            if (!it->is_array()) throw parse_error("channel.params", "expected an array of numbers");
            for (std::size_t i = 0; i < it->size(); ++i)
                params.push_back(number_from_json((*it)[i], "channel.params[" + std::to_string(i) + "]"));
        }
        const auto [n1, n2] = dims_from_json(require_field(ch, "dims", "channel"), "channel.dims");
        try {
            e.channel = zoo_channel(name.get<std::string>(), params, n1, n2);
        } catch (const Error& err) {
            throw parse_error("channel", err.what());
        }
    } else {
        e.channel = channel_from_json(ch, "channel");
    }
    e.config = config_from_json(require_field(j, "config", ""), channel_dims(e.channel).first, "config");
    return e;
}

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

inline Json verdict_to_json(const CpTpVerdict& v) {
    Json j;
    j["is_cp"] = v.is_cp;
    j["min_choi_eigenvalue"] = v.min_choi_eigenvalue;
    j["is_trace_preserving"] = v.is_trace_preserving;
    j["is_trace_nonincreasing"] = v.is_trace_nonincreasing;
    j["deviation_from_identity"] = v.deviation_from_identity;
    return j;
}

inline Json resources_to_json(const ResourceReport& r) {
    Json j;
    j["dims"] = Json::array({r.input_dim, r.output_dim});
    j["joint_state_dim"] = r.joint_state_dim;
    j["ensemble_measurements"] = r.ensemble_measurements;
    j["prior_method_measurements"] = r.prior_method_measurements;
    j["degrees_of_freedom"] = r.degrees_of_freedom;
    return j;
}

/// A tomography result is itself a valid kraus ChannelFile (the extracted
/// operators) with an extra "tomography" section of diagnostics.
inline Json tomography_result_to_json(const TomographyResult& r, const TomographyConfig& cfg) {
    Json j = channel_to_json(r.kraus);
    Json t;
    t["shots"] = cfg.shots.is_exact() ? Json("exact") : Json(cfg.shots.count());
    t["seed"] = cfg.seed;
    t["input_kind"] = std::holds_alternative<SchmidtInput>(cfg.input) ? "schmidt" : "max_entangled";
    t["psd_projection"] = cfg.psd_projection;
    t["kraus_threshold"] = r.kraus_threshold;
    t["kraus_count"] = r.kraus.size();
    t["choi_eigenvalues"] = hermitian_eig(r.estimated_choi.matrix()).eigenvalues;
    t["negativity_removed"] = r.negativity_removed;
    t["success_trace"] = r.success_trace;
    t["trace_decreasing"] = r.trace_decreasing;
    t["shots_used"] = r.shots_used;
    t["estimated_choi"] = matrix_to_json(r.estimated_choi.matrix());
    t["raw_state_estimate"] = matrix_to_json(r.raw_state_estimate);
    j["tomography"] = std::move(t);
    return j;
}

}  // namespace choiforge::io
