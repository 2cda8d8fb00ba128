#include "spherekit/sfun_io.hpp"

#include <fstream>

#include <json.hpp>

namespace spherekit {

namespace {

using nlohmann::json;

json complex_pair(const complex& c) { return json::array({c.real(), c.imag()}); }

complex pair_complex(const json& j) {
    if (!j.is_array() || j.size() != 2) throw io_error("sfun: malformed complex pair");
    return {j[0].get<double>(), j[1].get<double>()};
}

json coeffs_json(const CoeffVec& v) {
    json a = json::array();
    for (int i = 0; i < v.size(); ++i) a.push_back(complex_pair(v[i]));
    return a;
}

CoeffVec coeffs_from_json(const json& a, int expect) {
    if (!a.is_array() || static_cast<int>(a.size()) != expect)
        throw io_error("sfun: coefficient array has the wrong length");
    std::vector<complex> v(a.size());
    for (size_t i = 0; i < a.size(); ++i) v[i] = pair_complex(a[i]);
    return CoeffVec(std::move(v));
}

}  // namespace

void save_sfun(const LowRankSphereFun& f, const std::string& path) {
    json doc;
    doc["format"] = "spherekit-sfun";
    doc["format_version"] = 1;
    doc["k"] = f.rank();
    doc["m"] = f.theta_modes();
    doc["n"] = f.lambda_modes();
    doc["vscale"] = f.vscale;
    doc["tol"] = f.tol;
    json parity = json::array();
    for (Parity p : f.parity) parity.push_back(p == Parity::even ? "even" : "odd");
    doc["parity"] = std::move(parity);
    json d = json::array();
    for (const complex& c : f.d) d.push_back(complex_pair(c));
    doc["d"] = std::move(d);
    json cols = json::array();
    for (const CoeffVec& c : f.col_coeffs) cols.push_back(coeffs_json(c));
    doc["col_coeffs"] = std::move(cols);
    json rows = json::array();
    for (const CoeffVec& r : f.row_coeffs) rows.push_back(coeffs_json(r));
    doc["row_coeffs"] = std::move(rows);

    std::ofstream out(path);
    if (!out) throw io_error("sfun: cannot open '" + path + "' for writing");
    out << doc.dump(1) << '\n';
    if (!out) throw io_error("sfun: write to '" + path + "' failed");
}

LowRankSphereFun load_sfun(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw io_error("sfun: cannot open '" + path + "'");
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw io_error("sfun: '" + path + "' is not valid: " + e.what());
    }
    try {
        if (doc.at("format").get<std::string>() != "spherekit-sfun")
            throw io_error("sfun: '" + path + "' has an unknown format tag");
        if (doc.at("format_version").get<int>() != 1)
            throw io_error("sfun: '" + path + "' has an unsupported version");
        const int k = doc.at("k").get<int>();
        const int m = doc.at("m").get<int>();
        const int n = doc.at("n").get<int>();
        LowRankSphereFun f;
        f.vscale = doc.at("vscale").get<double>();
        f.tol = doc.at("tol").get<double>();
        const json& parity = doc.at("parity");
        const json& d = doc.at("d");
        const json& cols = doc.at("col_coeffs");
        const json& rows = doc.at("row_coeffs");
        if (static_cast<int>(parity.size()) != k || static_cast<int>(d.size()) != k ||
            static_cast<int>(cols.size()) != k || static_cast<int>(rows.size()) != k)
            throw io_error("sfun: '" + path + "' has inconsistent sizes");
        for (int j = 0; j < k; ++j) {
            const std::string p = parity[j].get<std::string>();
            if (p != "even" && p != "odd") throw io_error("sfun: bad parity flag");
            f.parity.push_back(p == "even" ? Parity::even : Parity::odd);
            f.d.push_back(pair_complex(d[j]));
            f.col_coeffs.push_back(coeffs_from_json(cols[j], m));
            f.row_coeffs.push_back(coeffs_from_json(rows[j], n));
        }
        return f;
    } catch (const json::exception& e) {
        throw io_error("sfun: '" + path + "' is missing fields: " + e.what());
    }
}

}  // namespace spherekit
