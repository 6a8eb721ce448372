#include "lab.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <thread>

#include "json.hpp"
#include "qrd/errors.hpp"

namespace qrd::lab {

namespace {

using json = nlohmann::json;

template <class T>
void take(const json& j, const char* key, T& into) {
    if (!j.contains(key)) return;
    try {
        into = j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw Error(ErrorKind::MalformedInput, std::string("config field \"") + key + "\": " + e.what());
    }
}

json extended_json(const ExtendedReal& v) {
    if (v.is_infinite()) return "inf";
    return v.value();
}

} // namespace

void ExperimentConfig::merge_json(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        throw Error(ErrorKind::MalformedInput, std::string("config is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw Error(ErrorKind::MalformedInput, "config must be a JSON object");
    take(j, "suite", suite);
    take(j, "kinds", kinds);
    take(j, "alphas", alphas);
    take(j, "zs", zs);
    take(j, "eps", eps);
    take(j, "ns", ns);
    for (const char* grid : {"kinds", "alphas", "zs", "eps", "ns"})
        if (j.contains(grid) && j.at(grid).empty())
            throw Error(ErrorKind::BadParams, std::string("config grid \"") + grid + "\" is empty");
    if (j.contains("seed")) {
        std::uint64_t s = 0;
        take(j, "seed", s);
        seed = s;
    }
    take(j, "restarts", restarts);
    take(j, "trials", trials);
    take(j, "tolerance", tolerance);
    take(j, "output", output_path);
    take(j, "format", format);
}

void ExperimentConfig::validate(bool stochastic) const {
    auto bad = [](const std::string& what) { throw Error(ErrorKind::BadParams, what); };
    if (!(tolerance > 0)) bad("tolerance must be positive");
    if (trials < 1) bad("trials must be at least 1");
    if (restarts < 0) bad("restarts must be nonnegative");
    if (stochastic && !seed) bad("a seed is required for stochastic runs");
    if (format != "json" && format != "csv") bad("format must be json or csv");
}

bool ResultRecord::passed() const {
    return std::all_of(assertions.begin(), assertions.end(), [](const auto& a) { return a.passed; });
}

void ResultRecord::check(const std::string& invariant, bool ok, const std::string& detail) {
    assertions.push_back({invariant, ok, detail});
}

int thread_cap() {
    if (const char* env = std::getenv("QRD_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0) return n;
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

std::string digest(const std::string& text) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string csv_cell(const ExtendedReal& v) { return v.is_infinite() ? std::string() : format_double(v.value()); }

std::string summary_to_json(const VerifySummary& summary, bool with_timing) {
    json failures = json::array();
    json records = json::array();
    for (const auto& r : summary.records) {
        json values = json::object();
        for (const auto& [name, v] : r.values) values[name] = extended_json(v);
        json asserts = json::array();
        for (const auto& a : r.assertions) {
            asserts.push_back({{"invariant", a.invariant}, {"passed", a.passed}, {"detail", a.detail}});
            if (!a.passed)
                failures.push_back({{"case", r.case_id}, {"invariant", a.invariant}, {"detail", a.detail}});
        }
        json rec = {{"suite", r.suite},   {"case", r.case_id},       {"inputs_digest", r.inputs_digest},
                    {"values", values},   {"assertions", asserts},   {"passed", r.passed()}};
        if (with_timing) rec["wall_time"] = r.wall_time;
        records.push_back(rec);
    }
    json out = {{"suite", summary.suite},   {"trials", summary.trials},       {"seed", summary.seed},
                {"passed", summary.passed()}, {"failure_count", summary.failures}, {"failures", failures},
                {"records", records}};
    return out.dump(2);
}

void parallel_for(int count, int threads, const std::function<void(int)>& fn) {
    const int workers = std::max(1, std::min(threads, count));
    if (workers == 1) {
        for (int i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    std::exception_ptr error;
    std::atomic<bool> failed{false};
    for (int w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (int i = next++; i < count; i = next++) {
                try {
                    fn(i);
                } catch (...) {
                    if (!failed.exchange(true)) error = std::current_exception();
                }
            }
        });
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

} // namespace qrd::lab
