#include "sils/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "sils/exact.hpp"

namespace sils {

void ExperimentConfig::validate() const {
    if (mode != "recovery" && mode != "comparison")
        throw std::invalid_argument("config: mode must be recovery or comparison");
    if (trials < 1) throw std::invalid_argument("config: trials must be >= 1");
    if (mode == "recovery" && c_grid.empty())
        throw std::invalid_argument("config: recovery mode needs a nonempty c grid");
    if (methods.empty()) throw std::invalid_argument("config: empty method list");
    for (const auto& m : methods)
        if (m != "sdp" && m != "lasso" && m != "dantzig" && m != "exact")
            throw std::invalid_argument("config: unknown method " + m);
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open config: " + path);
    ExperimentConfig cfg;
    cfg.methods.clear();
    std::string line;
    while (std::getline(is, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            const auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty()) continue;
        if (key == "mode") cfg.mode = value;
        else if (key == "model") cfg.model = std::stoi(value);
        else if (key == "d") cfg.d = std::stoi(value);
        else if (key == "sigma") cfg.sigma = std::stoi(value);
        else if (key == "rho") cfg.rho = std::stod(value);
        else if (key == "c") cfg.c_grid.push_back(std::stod(value));
        else if (key == "n") cfg.n_explicit = std::stoi(value);
        else if (key == "trials") cfg.trials = std::stoi(value);
        else if (key == "seed") cfg.seed = std::stoull(value);
        else if (key == "out") cfg.out = value;
        else if (key == "c_model") cfg.c_model = std::stod(value);
        else if (key == "cp_model") cfg.cp_model = std::stod(value);
        else if (key == "cpp_model") cfg.cpp_model = std::stod(value);
        else if (key == "lasso_param") cfg.lasso_param = value;
        else if (key == "dantzig_param") cfg.dantzig_param = value;
        else if (key == "folds") cfg.folds = std::stoi(value);
        else if (key == "rho_admm") cfg.solver.rho = std::stod(value);
        else if (key == "max_iter") cfg.solver.max_iter = std::stoi(value);
        else if (key == "feas_tol") cfg.solver.feas_tol = std::stod(value);
        else if (key == "methods") {
            std::stringstream ss(value);
            std::string tok;
            while (std::getline(ss, tok, ',')) cfg.methods.push_back(trim(tok));
        } else {
            throw std::runtime_error("config: unknown key " + key);
        }
    }
    if (cfg.methods.empty()) cfg.methods = {"sdp"};
    return cfg;
}

int sample_size(int model, double c, int d, int sigma, double rho) {
    const double logd = std::log(static_cast<double>(d));
    double n = 0.0;
    switch (model) {
        case 1: n = c * d * logd; break;
        case 2: n = c * rho * rho * sigma * sigma * logd; break;
        case 3: n = c * (sigma * sigma + rho * rho) * logd; break;
        default: throw std::invalid_argument("sample_size: bad model");
    }
    return std::max(1, static_cast<int>(std::ceil(n)));
}

int worker_count() {
    int hw = static_cast<int>(std::thread::hardware_concurrency());
    if (hw < 1) hw = 1;
    if (const char* env = std::getenv("SILS_THREADS")) {
        const int cap = std::atoi(env);
        if (cap >= 1) hw = std::min(hw, cap);
    }
    return hw;
}

namespace {

void parallel_for(int count, const std::function<void(int)>& fn) {
    const int workers = std::min(worker_count(), count);
    if (workers <= 1) {
        for (int i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr error;
    std::mutex error_mu;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (;;) {
                const int i = next.fetch_add(1);
                if (i >= count) return;
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mu);
                    if (!error) error = std::current_exception();
                }
            }
        });
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

std::vector<int> target_vector(const ExperimentConfig& cfg, const GroundTruth& truth) {
    std::vector<int> target(truth.z_star.size(), 0);
    if (cfg.model == 1) {
        for (int i = 0; i < cfg.sigma; ++i) target[i] = truth.z_star[i] > 0 ? 1 : -1;
    } else {
        for (std::size_t i = 0; i < truth.z_star.size(); ++i)
            target[i] = static_cast<int>(truth.z_star[i]);
    }
    return target;
}

// sign pattern on the top-sigma support, for baseline recovery flags
std::vector<int> rounded_support_vector(const Vec& z, int sigma) {
    std::vector<int> out(z.size(), 0);
    for (int i : top_sigma_support(z, sigma)) out[i] = z[i] >= 0.0 ? 1 : -1;
    return out;
}

ModelSpec make_spec(const ExperimentConfig& cfg, int n, std::uint64_t seed) {
    ModelSpec spec;
    spec.model_id = cfg.model;
    spec.n = n;
    spec.d = cfg.d;
    spec.sigma = cfg.sigma;
    spec.noise_param = cfg.rho;
    spec.c = cfg.c_model;
    spec.c_prime = cfg.cp_model;
    spec.c_dprime = cfg.cpp_model;
    spec.seed = seed;
    return spec;
}

ExperimentRecord base_record(const ExperimentConfig& cfg, int n, double c, int trial,
                             const std::string& method) {
    ExperimentRecord rec;
    rec.model = cfg.model;
    rec.n = n;
    rec.d = cfg.d;
    rec.sigma = cfg.sigma;
    rec.rho = cfg.rho;
    rec.c = c;
    rec.trial = trial;
    rec.method = method;
    return rec;
}

void fill_metrics(ExperimentRecord& rec, const Vec& z, const Generated& gen) {
    MetricsRow row = metrics(z, gen.truth, gen.instance.m, gen.instance.sigma);
    rec.nonzeros = row.nonzeros;
    rec.tpr = row.tpr;
    rec.pred_err = row.prediction_error;
    rec.succ_rate = row.successful_recovery_rate;
}

ExperimentRecord run_sdp_trial(const ExperimentConfig& cfg, const Generated& gen, int n,
                               double c, int trial, bool exact_in_budget) {
    ExperimentRecord rec = base_record(cfg, n, c, trial, "sdp");
    const auto t0 = std::chrono::steady_clock::now();
    SdpSolution sol = solve_sdp(gen.instance, cfg.solver);
    auto x = extract_rank_one(sol.w, gen.instance, cfg.solver, sol.objective);
    rec.wall_ms = std::chrono::duration<double, std::milli>(
                      std::chrono::steady_clock::now() - t0).count();
    rec.objective = sol.objective;

    Vec z(cfg.d);
    for (int i = 0; i < cfg.d; ++i) z[i] = sol.w(i + 1, 0);
    fill_metrics(rec, z, gen);

    rec.recovered_any = x.has_value();
    if (x && exact_in_budget) {
        ExactResult ex = solve_exact(gen.instance);
        rec.recovered_any = objective(gen.instance, x->dense()) <= ex.best_value + 1e-5;
    }
    rec.recovered_truth = x && x->x == target_vector(cfg, gen.truth);
    return rec;
}

ExperimentRecord run_baseline_trial(const ExperimentConfig& cfg, const Generated& gen, int n,
                                    double c, int trial, const std::string& method) {
    ExperimentRecord rec = base_record(cfg, n, c, trial, method);
    const bool is_lasso = method == "lasso";
    const std::string& policy = is_lasso ? cfg.lasso_param : cfg.dantzig_param;
    BaselineParams bp;
    bp.folds = cfg.folds;
    bp.cv_seed = cfg.seed + 977 * (trial + 1);
    const auto t0 = std::chrono::steady_clock::now();
    BaselineResult res;
    if (policy == "cv") {
        const auto grid = is_lasso ? default_lasso_grid(gen.instance.m, gen.instance.b)
                                   : default_dantzig_grid(gen.instance.m, gen.instance.b);
        res = cross_validate(gen.instance.m, gen.instance.b,
                             is_lasso ? BaselineMethod::lasso : BaselineMethod::dantzig,
                             grid, cfg.folds, bp);
    } else {
        double param;
        if (policy == "paper")
            param = is_lasso ? lasso_paper_lambda(cfg.d, n) : dantzig_paper_eta(cfg.d, cfg.rho);
        else
            param = std::stod(policy);
        res = is_lasso ? lasso(gen.instance.m, gen.instance.b, param, bp)
                       : dantzig(gen.instance.m, gen.instance.b, param, bp);
    }
    rec.wall_ms = std::chrono::duration<double, std::milli>(
                      std::chrono::steady_clock::now() - t0).count();
    rec.objective = res.objective_or_l1;
    fill_metrics(rec, res.z, gen);
    rec.recovered_any = false;
    rec.recovered_truth =
        rounded_support_vector(res.z, cfg.sigma) == target_vector(cfg, gen.truth);
    return rec;
}

ExperimentRecord run_exact_trial(const ExperimentConfig& cfg, const Generated& gen, int n,
                                 double c, int trial) {
    ExperimentRecord rec = base_record(cfg, n, c, trial, "exact");
    const auto t0 = std::chrono::steady_clock::now();
    ExactResult ex = solve_exact(gen.instance);
    rec.wall_ms = std::chrono::duration<double, std::milli>(
                      std::chrono::steady_clock::now() - t0).count();
    rec.objective = ex.best_value;
    fill_metrics(rec, ex.best_x.dense(), gen);
    rec.recovered_any = false;
    rec.recovered_truth = ex.best_x.x == target_vector(cfg, gen.truth);
    return rec;
}

std::string fmt10(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

void append_row(std::ostringstream& os, const ExperimentRecord& r) {
    os << r.model << ',' << r.n << ',' << r.d << ',' << r.sigma << ',' << fmt10(r.rho) << ','
       << fmt10(r.c) << ',' << r.trial << ',' << r.method << ',' << (r.recovered_any ? 1 : 0)
       << ',' << (r.recovered_truth ? 1 : 0) << ',' << r.nonzeros << ',' << fmt10(r.tpr) << ','
       << fmt10(r.pred_err) << ',' << fmt10(r.succ_rate) << ',' << fmt10(r.objective) << ','
       << fmt10(r.wall_ms) << '\n';
}

void append_aggregates(std::ostringstream& os, const std::vector<ExperimentRecord>& cell) {
    if (cell.empty()) return;
    const ExperimentRecord& first = cell.front();
    auto agg = [&](const char* tag, auto reduce) {
        os << first.model << ',' << first.n << ',' << first.d << ',' << first.sigma << ','
           << fmt10(first.rho) << ',' << fmt10(first.c) << ',' << tag << ',' << first.method;
        auto col = [&](auto get) {
            double m = reduce(cell, get);
            os << ',' << fmt10(m);
        };
        col([](const ExperimentRecord& r) { return r.recovered_any ? 1.0 : 0.0; });
        col([](const ExperimentRecord& r) { return r.recovered_truth ? 1.0 : 0.0; });
        col([](const ExperimentRecord& r) { return static_cast<double>(r.nonzeros); });
        col([](const ExperimentRecord& r) { return r.tpr; });
        col([](const ExperimentRecord& r) { return r.pred_err; });
        col([](const ExperimentRecord& r) { return r.succ_rate; });
        col([](const ExperimentRecord& r) { return r.objective; });
        col([](const ExperimentRecord& r) { return r.wall_ms; });
        os << '\n';
    };
    using Get = std::function<double(const ExperimentRecord&)>;
    agg("mean", [](const std::vector<ExperimentRecord>& rows, const Get& get) {
        double s = 0.0;
        for (const auto& r : rows) s += get(r);
        return s / rows.size();
    });
    agg("min", [](const std::vector<ExperimentRecord>& rows, const Get& get) {
        double s = get(rows.front());
        for (const auto& r : rows) s = std::min(s, get(r));
        return s;
    });
    agg("max", [](const std::vector<ExperimentRecord>& rows, const Get& get) {
        double s = get(rows.front());
        for (const auto& r : rows) s = std::max(s, get(r));
        return s;
    });
}

constexpr const char* kCsvHeaderComment =
    "# columns: model,n,d,sigma,rho,c,trial,method,recovered_any,recovered_truth,"
    "nonzeros,tpr,pred_err,succ_rate,objective,wall_ms; aggregate rows use "
    "trial=mean|min|max and average boolean flags as fractions\n";
constexpr const char* kCsvHeader =
    "model,n,d,sigma,rho,c,trial,method,recovered_any,recovered_truth,nonzeros,tpr,"
    "pred_err,succ_rate,objective,wall_ms\n";

} // namespace

void write_csv(std::ostream& os, const std::vector<ExperimentRecord>& rows) {
    std::ostringstream buf;
    buf << kCsvHeaderComment << kCsvHeader;
    for (const auto& r : rows) append_row(buf, r);
    os << buf.str();
}

ExperimentResult run_recovery_curve(const ExperimentConfig& cfg) {
    cfg.validate();
    ExperimentResult out;
    std::ostringstream csv;
    csv << kCsvHeaderComment << kCsvHeader;
    bool exact_in_budget = true;
    try {
        exact_in_budget = enumeration_count(cfg.d, cfg.sigma, 1000000ull) > 0;
    } catch (const std::invalid_argument&) {
        exact_in_budget = false;
    }
    for (std::size_t cell = 0; cell < cfg.c_grid.size(); ++cell) {
        const double c = cfg.c_grid[cell];
        const int n = sample_size(cfg.model, c, cfg.d, cfg.sigma, cfg.rho);
        std::vector<ExperimentRecord> cell_rows(cfg.trials);
        parallel_for(cfg.trials, [&](int trial) {
            const std::uint64_t seed = cfg.seed + cell * 1000000ull + trial;
            Generated gen = generate(make_spec(cfg, n, seed));
            cell_rows[trial] = run_sdp_trial(cfg, gen, n, c, trial, exact_in_budget);
        });
        for (const auto& r : cell_rows) {
            append_row(csv, r);
            out.rows.push_back(r);
        }
        append_aggregates(csv, cell_rows);
    }
    out.csv = csv.str();
    return out;
}

ExperimentResult run_comparison(const ExperimentConfig& cfg) {
    cfg.validate();
    int n = cfg.n_explicit;
    if (n == 0) {
        const double logd = std::log(static_cast<double>(cfg.d));
        if (cfg.model == 2)
            n = static_cast<int>(std::ceil(2.0 * cfg.sigma * cfg.sigma * logd));
        else if (cfg.model == 3)
            n = static_cast<int>(std::ceil(cfg.sigma * cfg.sigma * logd));
        else
            n = static_cast<int>(std::ceil(cfg.d * logd));
    }
    bool exact_in_budget = true;
    try {
        exact_in_budget = enumeration_count(cfg.d, cfg.sigma, 1000000ull) > 0;
    } catch (const std::invalid_argument&) {
        exact_in_budget = false;
    }

    ExperimentResult out;
    std::ostringstream csv;
    csv << kCsvHeaderComment << kCsvHeader;
    std::vector<std::vector<ExperimentRecord>> per_trial(cfg.trials);
    parallel_for(cfg.trials, [&](int trial) {
        Generated gen = generate(make_spec(cfg, n, cfg.seed + trial));
        for (const auto& method : cfg.methods) {
            if (method == "sdp")
                per_trial[trial].push_back(
                    run_sdp_trial(cfg, gen, n, 0.0, trial, exact_in_budget));
            else if (method == "exact")
                per_trial[trial].push_back(run_exact_trial(cfg, gen, n, 0.0, trial));
            else
                per_trial[trial].push_back(
                    run_baseline_trial(cfg, gen, n, 0.0, trial, method));
        }
    });
    for (const auto& method : cfg.methods) {
        std::vector<ExperimentRecord> cell_rows;
        for (int trial = 0; trial < cfg.trials; ++trial)
            for (const auto& r : per_trial[trial])
                if (r.method == method) cell_rows.push_back(r);
        for (const auto& r : cell_rows) {
            append_row(csv, r);
            out.rows.push_back(r);
        }
        append_aggregates(csv, cell_rows);
    }
    out.csv = csv.str();
    return out;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
    return cfg.mode == "recovery" ? run_recovery_curve(cfg) : run_comparison(cfg);
}

} // namespace sils
