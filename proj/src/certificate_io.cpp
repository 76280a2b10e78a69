#include "switchsync/certificate_io.hpp"

#include <fstream>
#include <sstream>

#include "switchsync/errors.hpp"

namespace switchsync {

using nlohmann::json;

json matrix_to_json(const Matrix& m) {
    json rows = json::array();
    for (std::size_t i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (std::size_t j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

Matrix matrix_from_json(const json& j, const char* field) {
    const std::string name(field);
    if (!j.is_array() || j.empty() || !j.front().is_array() || j.front().empty()) {
        throw InvalidInput("certificate field '" + name + "' must be a non-empty array of rows");
    }
    const std::size_t rows = j.size();
    const std::size_t cols = j.front().size();
    std::vector<double> data;
    data.reserve(rows * cols);
    for (const auto& row : j) {
        if (!row.is_array() || row.size() != cols) {
            throw InvalidInput("certificate field '" + name + "' has ragged rows");
        }
        for (const auto& v : row) {
            if (!v.is_number()) throw InvalidInput("certificate field '" + name + "' has a non-numeric entry");
            data.push_back(v.get<double>());
        }
    }
    return Matrix(rows, cols, std::move(data));
}

namespace {

std::vector<double> reals(const json& j, const char* field) {
    if (!j.contains(field) || !j.at(field).is_array()) {
        throw InvalidInput(std::string("certificate field '") + field + "' must be an array");
    }
    std::vector<double> out;
    for (const auto& v : j.at(field)) {
        if (!v.is_number()) throw InvalidInput(std::string("certificate field '") + field + "' is not numeric");
        out.push_back(v.get<double>());
    }
    return out;
}

double real(const json& j, const char* field) {
    if (!j.contains(field) || !j.at(field).is_number()) {
        throw InvalidInput(std::string("certificate field '") + field + "' must be a number");
    }
    return j.at(field).get<double>();
}

const json& member(const json& j, const char* field) {
    if (!j.contains(field)) throw InvalidInput(std::string("certificate is missing '") + field + "'");
    return j.at(field);
}

}  // namespace

json certificate_to_json(const GainCertificate& c) {
    json j;
    j["b_form"] = to_string(c.b_form);
    j["alpha_range"] = {c.alpha_range[0], c.alpha_range[1]};
    j["Y"] = matrix_to_json(c.y.matrix());
    j["Ka"] = matrix_to_json(c.ka);
    j["P"] = matrix_to_json(c.p.matrix());
    j["K"] = matrix_to_json(c.k);
    j["eps"] = c.eps;
    j["delta"] = c.delta;
    j["lmi_margins"] = c.lmi_margins;
    j["bmi_margins"] = c.bmi_margins;
    j["p_eigenvalues"] = c.p_eigenvalues;
    return j;
}

GainCertificate certificate_from_json(const json& j) {
    if (!j.is_object()) throw InvalidInput("certificate must be a JSON object");
    GainCertificate c;
    const json& bf = member(j, "b_form");
    if (!bf.is_string()) throw InvalidInput("certificate field 'b_form' must be a string");
    c.b_form = parse_bform(bf.get<std::string>());

    const auto range = reals(j, "alpha_range");
    if (range.size() != 2 || !(range[0] <= range[1])) {
        throw InvalidInput("certificate field 'alpha_range' must be [lo, hi] with lo <= hi");
    }
    c.alpha_range = {range[0], range[1]};

    const Matrix y = matrix_from_json(member(j, "Y"), "Y");
    const Matrix p = matrix_from_json(member(j, "P"), "P");
    if (y.rows() != 3 || y.cols() != 3 || p.rows() != 3 || p.cols() != 3) {
        throw InvalidInput("certificate Y and P must be 3x3");
    }
    c.y = SymMatrix(y);
    c.p = SymMatrix(p);
    c.ka = matrix_from_json(member(j, "Ka"), "Ka");
    c.k = matrix_from_json(member(j, "K"), "K");
    const std::size_t m = DistributionMatrix(c.b_form).inputs();
    if (c.ka.rows() != m || c.ka.cols() != 3 || c.k.rows() != m || c.k.cols() != 3) {
        throw InvalidInput("certificate Ka and K must be " + std::to_string(m) + "x3 for b_form " + to_string(c.b_form));
    }
    c.eps = real(j, "eps");
    c.delta = real(j, "delta");
    c.lmi_margins = reals(j, "lmi_margins");
    c.bmi_margins = reals(j, "bmi_margins");
    c.p_eigenvalues = reals(j, "p_eigenvalues");
    if (c.p_eigenvalues.empty()) c.p_eigenvalues = sym_eigenvalues(c.p);
    return c;
}

void write_certificate(const std::filesystem::path& path, const GainCertificate& c) {
    std::ofstream out(path);
    if (!out) throw InvalidInput("cannot open '" + path.string() + "' for writing");
    out << certificate_to_json(c).dump(2) << '\n';
    if (!out) throw InvalidInput("failed writing '" + path.string() + "'");
}

GainCertificate read_certificate(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InvalidInput("cannot open certificate '" + path.string() + "'");
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw InvalidInput("certificate '" + path.string() + "' is not valid JSON: " + e.what());
    }
    return certificate_from_json(j);
}

}  // namespace switchsync
