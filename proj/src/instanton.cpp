#include "loopdec/instanton.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>

#include "loopdec/numeric.hpp"

namespace loopdec {

namespace {

// dedup key: support set plus omega rounded to 1e-6
std::string dedup_key(const std::vector<double>& omega) {
    std::ostringstream key;
    for (size_t i = 0; i < omega.size(); ++i) {
        if (omega[i] <= 1e-7) continue;
        key << i << ':' << static_cast<long long>(std::llround(omega[i] * 1e6)) << ';';
    }
    return key.str();
}

}  // namespace

std::optional<InstantonRecord> search_instanton(const ParityCheckCode& code, std::uint64_t seed,
                                                const InstantonSearchParams& params) {
    if (params.max_steps < 1)
        throw std::invalid_argument("search_instanton: max_steps must be >= 1");
    Rng rng(seed);
    int n = code.n_bits();
    LlrVector h(n);
    double sd = std::sqrt(params.init_variance);
    for (int i = 0; i < n; ++i) h[i] = 1.0 + sd * rng.next_gaussian();

    InstantonRecord rec;
    rec.seed = seed;
    std::vector<double> prev;
    for (int step = 0; step < params.max_steps; ++step) {
        // push slightly past the equal-cost surface so the solver leaves the
        // transmitted codeword deterministically
        LlrVector hq(n);
        for (int i = 0; i < n; ++i) hq[i] = 1.0 + (1.0 + params.nudge) * (h[i] - 1.0);
        LpDecodeResult lp = decode_lp(code, hq);
        std::vector<double> omega;
        if (lp.success) {
            bool all_plus = std::all_of(lp.decoded_spins.begin(), lp.decoded_spins.end(),
                                        [](int s) { return s == 1; });
            if (all_plus) {
                if (step == 0) return std::nullopt;  // no failure to descend along
                // tie resolved to the transmitted side; keep the previous point
                break;
            }
            omega.assign(n, 0.0);
            for (int i = 0; i < n; ++i) omega[i] = lp.decoded_spins[i] < 0 ? 1.0 : 0.0;
        } else {
            omega = lp.pseudo_codeword->omega;
        }
        rec.steps = step + 1;
        rec.trajectory.push_back({step, effective_distance(omega)});
        if (!prev.empty()) {
            double d = 0.0;
            for (int i = 0; i < n; ++i) d = std::max(d, std::fabs(omega[i] - prev[i]));
            if (d < params.settle_tol) {
                rec.converged = true;
                prev = omega;
                break;
            }
        }
        prev = omega;
        h = instanton_noise_for(omega);
    }
    if (prev.empty()) return std::nullopt;
    rec.pseudo_codeword.omega = prev;
    rec.pseudo_codeword.is_integral =
        std::all_of(prev.begin(), prev.end(),
                    [](double v) { return std::fabs(v - std::round(v)) <= 1e-7; });
    rec.instanton_llr = instanton_noise_for(prev);
    rec.eff_distance = effective_distance(prev);
    rec.pseudo_codeword.eff_distance = rec.eff_distance;
    double obj = 0.0;
    for (int i = 0; i < n; ++i) obj += 2.0 * rec.instanton_llr[i] * prev[i];
    rec.pseudo_codeword.objective_value = obj;
    return rec;
}

InstantonCatalog build_instanton_catalog(const ParityCheckCode& code, int n_seeds,
                                         std::uint64_t seed0,
                                         const InstantonSearchParams& params, int threads) {
    if (threads <= 0) {
        unsigned hw = std::thread::hardware_concurrency();
        threads = hw ? static_cast<int>(hw) : 4;
    }
    threads = std::min(threads, std::max(1, n_seeds));

    std::vector<std::optional<InstantonRecord>> results(n_seeds);
    std::atomic<int> next{0};
    auto worker = [&]() {
        while (true) {
            int k = next.fetch_add(1);
            if (k >= n_seeds) break;
            results[k] = search_instanton(code, seed0 + static_cast<std::uint64_t>(k), params);
        }
    };
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();

    InstantonCatalog cat;
    cat.seeds_run = n_seeds;
    std::set<std::string> seen;
    for (auto& r : results) {
        if (!r) continue;
        ++cat.raw_converged;
        if (seen.insert(dedup_key(r->pseudo_codeword.omega)).second)
            cat.records.push_back(std::move(*r));
    }
    std::sort(cat.records.begin(), cat.records.end(),
              [](const InstantonRecord& a, const InstantonRecord& b) {
                  if (a.eff_distance != b.eff_distance) return a.eff_distance < b.eff_distance;
                  return a.seed < b.seed;
              });
    return cat;
}

namespace {

void write_vector(std::ostream& out, const std::vector<double>& v) {
    out << '[';
    out.precision(17);
    for (size_t i = 0; i < v.size(); ++i) {
        if (i) out << ',';
        out << v[i];
    }
    out << ']';
}

}  // namespace

void save_catalog(const InstantonCatalog& catalog, const std::string& dir) {
    std::filesystem::create_directories(dir);
    std::ofstream out(std::filesystem::path(dir) / "catalog.jsonl");
    if (!out) throw std::runtime_error("cannot write catalog in " + dir);
    out.precision(17);
    for (const auto& r : catalog.records) {
        out << "{\"seed\":" << r.seed << ",\"d_eff\":" << r.eff_distance
            << ",\"steps\":" << r.steps << ",\"converged\":" << (r.converged ? "true" : "false")
            << ",\"omega\":";
        write_vector(out, r.pseudo_codeword.omega);
        out << ",\"h\":";
        write_vector(out, r.instanton_llr);
        out << "}\n";
    }
    std::ofstream meta(std::filesystem::path(dir) / "catalog_meta.json");
    meta << "{\"seeds_run\":" << catalog.seeds_run << ",\"raw_converged\":" << catalog.raw_converged
         << ",\"distinct\":" << catalog.records.size() << "}\n";
}

namespace {

std::vector<double> parse_array(const std::string& line, const std::string& key) {
    auto pos = line.find("\"" + key + "\":[");
    if (pos == std::string::npos) throw std::runtime_error("catalog: missing field " + key);
    pos = line.find('[', pos);
    auto end = line.find(']', pos);
    std::vector<double> out;
    std::string body = line.substr(pos + 1, end - pos - 1);
    std::istringstream ss(body);
    std::string tok;
    while (std::getline(ss, tok, ',')) out.push_back(std::stod(tok));
    return out;
}

double parse_number(const std::string& line, const std::string& key) {
    auto pos = line.find("\"" + key + "\":");
    if (pos == std::string::npos) throw std::runtime_error("catalog: missing field " + key);
    return std::stod(line.substr(pos + key.size() + 3));
}

}  // namespace

InstantonCatalog load_catalog(const std::string& dir) {
    std::ifstream in(std::filesystem::path(dir) / "catalog.jsonl");
    if (!in) throw std::runtime_error("cannot read catalog in " + dir);
    InstantonCatalog cat;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        InstantonRecord r;
        r.seed = static_cast<std::uint64_t>(parse_number(line, "seed"));
        r.eff_distance = parse_number(line, "d_eff");
        r.steps = static_cast<int>(parse_number(line, "steps"));
        r.converged = line.find("\"converged\":true") != std::string::npos;
        r.pseudo_codeword.omega = parse_array(line, "omega");
        r.instanton_llr = parse_array(line, "h");
        r.pseudo_codeword.eff_distance = r.eff_distance;
        cat.records.push_back(std::move(r));
    }
    return cat;
}

}  // namespace loopdec
