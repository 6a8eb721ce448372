#pragma once

#include <string>

#include "qrd/channels.hpp"
#include "qrd/opcore.hpp"
#include "qrd/reversetests.hpp"

namespace qrd {

// Matrix objects are {"re": [[...]], "im": [[...]]} with "im" optional; a bare nested
// array of numbers is read as a real matrix. Malformed text throws MalformedInput.
Matrix parse_matrix(const std::string& json_text);
std::string matrix_to_json(const Matrix& m);

HermitianOperator parse_operator(const std::string& json_text);

// {"d_in", "d_out", "kraus": [matrix objects]} or {"d_in", "d_out", "choi": matrix object}.
// Choi matrices use Omega = sum_i e_i (x) e_i with the input copy on the first factor.
Channel parse_channel(const std::string& json_text);
std::string channel_to_json(const Channel& channel);

// {"omegas": [matrix objects], "p": [...], "q": [...]}
ReverseTest parse_reverse_test(const std::string& json_text);
std::string reverse_test_to_json(const ReverseTest& rt);

std::string read_text_file(const std::string& path);

} // namespace qrd
