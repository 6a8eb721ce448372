#include "qrd/io.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

namespace qrd {

namespace {

using json = nlohmann::json;

[[noreturn]] void malformed(const std::string& what) { throw Error(ErrorKind::MalformedInput, what); }

json parse_text(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const json::exception& e) {
        malformed(std::string("invalid JSON: ") + e.what());
    }
}

Eigen::MatrixXd real_grid(const json& j, const char* field) {
    if (!j.is_array() || j.empty()) malformed(std::string(field) + " must be a nonempty array of rows");
    const std::size_t rows = j.size();
    const std::size_t cols = j.front().is_array() ? j.front().size() : 0;
    if (cols == 0) malformed(std::string(field) + " rows must be nonempty arrays");
    Eigen::MatrixXd out(rows, cols);
    for (std::size_t r = 0; r < rows; ++r) {
        if (!j[r].is_array() || j[r].size() != cols) malformed(std::string(field) + " is ragged");
        for (std::size_t c = 0; c < cols; ++c) {
            if (!j[r][c].is_number()) malformed(std::string(field) + " entries must be numbers");
            out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = j[r][c].get<double>();
        }
    }
    return out;
}

Matrix matrix_from(const json& j) {
    if (j.is_array()) return real_grid(j, "matrix").cast<Complex>();
    if (!j.is_object() || !j.contains("re")) malformed("matrix object needs a \"re\" field");
    const Eigen::MatrixXd re = real_grid(j.at("re"), "re");
    Eigen::MatrixXd im = Eigen::MatrixXd::Zero(re.rows(), re.cols());
    if (j.contains("im")) {
        im = real_grid(j.at("im"), "im");
        if (im.rows() != re.rows() || im.cols() != re.cols()) malformed("re and im shapes differ");
    }
    Matrix m(re.rows(), re.cols());
    m.real() = re;
    m.imag() = im;
    return m;
}

json matrix_json(const Matrix& m) {
    json re = json::array(), im = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        json rr = json::array(), ir = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            rr.push_back(m(r, c).real());
            ir.push_back(m(r, c).imag());
        }
        re.push_back(rr);
        im.push_back(ir);
    }
    return json{{"re", re}, {"im", im}};
}

HermitianOperator operator_from(const json& j) {
    const Matrix m = matrix_from(j);
    if (m.rows() != m.cols()) malformed("operator must be square");
    try {
        return HermitianOperator(m);
    } catch (const Error& e) {
        malformed(std::string("operator is not Hermitian: ") + e.what());
    }
}

int positive_int(const json& j, const char* field) {
    if (!j.contains(field) || !j.at(field).is_number_integer() || j.at(field).get<int>() < 1)
        malformed(std::string("\"") + field + "\" must be a positive integer");
    return j.at(field).get<int>();
}

std::vector<double> weights_from(const json& j, const char* field) {
    if (!j.contains(field) || !j.at(field).is_array()) malformed(std::string("\"") + field + "\" must be an array");
    std::vector<double> out;
    for (const auto& v : j.at(field)) {
        if (!v.is_number()) malformed(std::string("\"") + field + "\" entries must be numbers");
        out.push_back(v.get<double>());
    }
    return out;
}

} // namespace

Matrix parse_matrix(const std::string& json_text) { return matrix_from(parse_text(json_text)); }

std::string matrix_to_json(const Matrix& m) { return matrix_json(m).dump(); }

HermitianOperator parse_operator(const std::string& json_text) { return operator_from(parse_text(json_text)); }

Channel parse_channel(const std::string& json_text) {
    const json j = parse_text(json_text);
    if (!j.is_object()) malformed("channel must be a JSON object");
    const int d_in = positive_int(j, "d_in");
    const int d_out = positive_int(j, "d_out");
    if (j.contains("choi")) {
        const HermitianOperator choi = operator_from(j.at("choi"));
        if (choi.dim() != d_in * d_out) malformed("Choi matrix size must be d_in * d_out");
        return Channel::from_choi(choi, d_in, d_out);
    }
    if (!j.contains("kraus") || !j.at("kraus").is_array() || j.at("kraus").empty())
        malformed("channel needs a nonempty \"kraus\" array or a \"choi\" matrix");
    std::vector<Matrix> kraus;
    for (const auto& k : j.at("kraus")) {
        kraus.push_back(matrix_from(k));
        if (kraus.back().rows() != d_out || kraus.back().cols() != d_in)
            malformed("Kraus operator shape must be d_out x d_in");
    }
    return Channel::from_kraus(std::move(kraus));
}

std::string channel_to_json(const Channel& channel) {
    json kraus = json::array();
    for (const auto& k : channel.kraus()) kraus.push_back(matrix_json(k));
    return json{{"d_in", channel.d_in()}, {"d_out", channel.d_out()}, {"kraus", kraus}}.dump();
}

ReverseTest parse_reverse_test(const std::string& json_text) {
    const json j = parse_text(json_text);
    if (!j.is_object() || !j.contains("omegas") || !j.at("omegas").is_array())
        malformed("reverse test needs an \"omegas\" array");
    std::vector<HermitianOperator> omegas;
    for (const auto& o : j.at("omegas")) omegas.push_back(operator_from(o));
    return ReverseTest(std::move(omegas), WeightVector(weights_from(j, "p")), WeightVector(weights_from(j, "q")));
}

std::string reverse_test_to_json(const ReverseTest& rt) {
    json omegas = json::array();
    for (const auto& o : rt.omegas) omegas.push_back(matrix_json(o.matrix()));
    return json{{"omegas", omegas}, {"p", rt.p.values()}, {"q", rt.q.values()}}.dump();
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) malformed("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace qrd
