#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qrd/extended_real.hpp"

namespace qrd::lab {

struct ExperimentConfig {
    std::string suite;
    std::vector<std::string> kinds;
    std::vector<double> alphas;
    std::vector<double> zs;
    std::vector<double> eps;
    std::vector<int> ns;
    std::optional<std::uint64_t> seed;
    int restarts = 8;
    int trials = 20;
    double tolerance = 1e-9;
    std::string output_path;
    std::string format = "json";

    // Keys missing from the JSON keep their current values. Throws MalformedInput.
    void merge_json(const std::string& json_text);
    // Throws BadParams on empty grids, nonpositive tolerances or a missing seed for stochastic suites.
    void validate(bool stochastic) const;
};

struct AssertionOutcome {
    std::string invariant;  // "<module>.<invariant>"
    bool passed;
    std::string detail;
};

struct ResultRecord {
    std::string suite;
    std::string case_id;
    std::string inputs_digest;
    std::vector<std::pair<std::string, ExtendedReal>> values;
    std::vector<AssertionOutcome> assertions;
    double wall_time = 0;

    bool passed() const;
    void check(const std::string& invariant, bool ok, const std::string& detail = {});
    void value(const std::string& name, const ExtendedReal& v) { values.emplace_back(name, v); }
};

struct VerifySummary {
    std::string suite;
    int trials = 0;
    std::uint64_t seed = 0;
    std::vector<ResultRecord> records;
    int failures = 0;  // failing assertions across all records

    bool passed() const { return failures == 0; }
};

std::vector<std::string> verify_suites();

// Trials shard over at most `threads` workers; each trial draws from make_rng(seed, trial).
VerifySummary run_verify(const std::string& suite, int trials, std::uint64_t seed, int threads);

// QRD_THREADS when set and positive, else the hardware concurrency (at least 1).
int thread_cap();

// FNV-1a over the given text, as 16 hex digits.
std::string digest(const std::string& text);

// Output helpers: JSON writes +inf as "inf", CSV leaves the cell empty.
std::string summary_to_json(const VerifySummary& summary, bool with_timing);
std::string csv_cell(const ExtendedReal& v);
std::string format_double(double v);

// Runs fn over [0, count) on up to `threads` workers.
void parallel_for(int count, int threads, const std::function<void(int)>& fn);

} // namespace qrd::lab
