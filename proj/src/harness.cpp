#include "sbopt/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

#include "sbopt/tsplib.hpp"

namespace sbopt {

namespace fs = std::filesystem;

void ExperimentConfig::validate() const {
    if (repetitions < 1) throw ConfigError("config: repetitions must be >= 1");
    if (budget < 1) throw ConfigError("config: budget must be >= 1");
    if (strategies.empty()) throw ConfigError("config: at least one strategy required");
    for (const auto& s : strategies)
        if (s != "gp" && s != "pl" && s != "dr" && s != "rs")
            throw ConfigError("config: unknown strategy '" + s + "'");
    if (problem_name != "rosenbrock" && problem_name != "maxcut" && problem_name != "tsp" &&
        problem_name != "external")
        throw ConfigError("config: unknown problem '" + problem_name + "'");
    if (problem_name == "tsp" && tsplib_path.empty())
        throw ConfigError("config: tsp requires --tsplib FILE");
    if (problem_name == "external" && command_template.empty())
        throw ConfigError("config: external requires --cmd TEMPLATE");
}

std::shared_ptr<Problem> make_problem(const ExperimentConfig& config) {
    std::shared_ptr<Problem> p;
    if (config.problem_name == "rosenbrock") {
        p = std::make_shared<RosenbrockProblem>(config.dim);
    } else if (config.problem_name == "maxcut") {
        // One graph per size, shared by all runs and strategies.
        const auto graph_seed = derive_seed(config.master_seed, "maxcut-graph", config.dim);
        p = std::make_shared<MaxCutProblem>(maxcut_generate(
            config.dim, config.maxcut_edge_probability, config.maxcut_max_weight, graph_seed));
    } else if (config.problem_name == "tsp") {
        p = std::make_shared<TspProblem>(parse_atsp_file(config.tsplib_path));
    } else if (config.problem_name == "external") {
        Bounds b(std::vector<int>(config.dim, 0), std::vector<int>(config.dim, 7));
        p = std::make_shared<ExternalProblem>(config.command_template, b,
                                              config.external_timeout);
    } else {
        throw ConfigError("unknown problem '" + config.problem_name + "'");
    }
    if (config.binarize) p = std::make_shared<BinarizedProblem>(p);
    if (config.shuffle)
        p = std::make_shared<ShuffledProblem>(p, derive_seed(config.master_seed, "shuffle"));
    return p;
}

AggregateSeries aggregate_runs(const std::string& strategy, const std::vector<RunLog>& runs,
                               std::size_t budget) {
    AggregateSeries agg;
    agg.strategy = strategy;
    agg.mean_best.assign(budget, std::numeric_limits<double>::quiet_NaN());
    agg.std_best.assign(budget, std::numeric_limits<double>::quiet_NaN());
    agg.mean_cum_model_time.assign(budget, std::numeric_limits<double>::quiet_NaN());

    for (std::size_t m = 0; m < budget; ++m) {
        double sum = 0.0, sumsq = 0.0, time_sum = 0.0;
        std::size_t count = 0;
        for (const auto& run : runs) {
            if (run.history.size() <= m) continue;
            const double b = run.best_so_far[m];
            sum += b;
            sumsq += b * b;
            double cum = 0.0;
            for (std::size_t j = 0; j <= m; ++j) cum += run.history.records[j].model_time;
            time_sum += cum;
            ++count;
        }
        if (count == 0) continue;
        const double mean = sum / static_cast<double>(count);
        agg.mean_best[m] = mean;
        agg.std_best[m] = std::sqrt(std::max(0.0, sumsq / static_cast<double>(count) - mean * mean));
        agg.mean_cum_model_time[m] = time_sum / static_cast<double>(count);
    }
    return agg;
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
    config.validate();
    make_problem(config);  // fail fast on problem construction errors

    struct Task {
        std::string strategy;
        std::size_t run_idx;
    };
    std::vector<Task> tasks;
    for (const auto& s : config.strategies)
        for (std::size_t r = 0; r < config.repetitions; ++r) tasks.push_back({s, r});

    std::vector<RunLog> logs(tasks.size());
    std::atomic<std::size_t> next_task{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;

    auto worker = [&] {
        while (true) {
            const std::size_t t = next_task.fetch_add(1);
            if (t >= tasks.size()) return;
            try {
                const auto& task = tasks[t];
                auto problem = make_problem(config);
                auto strategy = make_strategy(task.strategy, problem->bounds(), 0,
                                              config.strategy_options);
                const auto seed =
                    derive_seed(config.master_seed, "run:" + task.strategy, task.run_idx);
                BudgetSpec budget{config.budget, config.wall_clock_limit};
                const std::string id = config.problem_name + "/" + task.strategy + "/" +
                                       std::to_string(task.run_idx);
                logs[t] = run_optimization(*problem, *strategy, budget, seed, id);
            } catch (...) {
                std::lock_guard<std::mutex> lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                return;
            }
        }
    };

    unsigned workers = config.parallelism ? config.parallelism
                                          : std::max(1u, std::thread::hardware_concurrency());
    workers = std::min<unsigned>(workers, static_cast<unsigned>(tasks.size()));
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);

    ExperimentResult result;
    for (std::size_t t = 0; t < tasks.size(); ++t)
        result.by_strategy[tasks[t].strategy].runs.push_back(std::move(logs[t]));
    for (auto& [name, sr] : result.by_strategy) {
        sr.aggregate = aggregate_runs(name, sr.runs, config.budget);
        for (const auto& run : sr.runs)
            if (run.status != RunStatus::ok || run.history.size() < config.budget)
                sr.warning = true;
    }
    return result;
}

// ---------------------------------------------------------------------------
// Time-budget sweep
// ---------------------------------------------------------------------------

std::size_t affordable_iterations(const std::vector<double>& model_times, double eval_time,
                                  double time_budget) {
    std::size_t m = 0;
    double acc = 0.0;
    for (const double t : model_times) {
        acc += t + eval_time;
        if (acc > time_budget) break;
        ++m;
    }
    return m;
}

SweepResult time_budget_sweep(const std::map<std::string, std::vector<RunLog>>& logs,
                              const std::vector<double>& eval_time_grid,
                              const std::vector<double>& budget_grid,
                              std::size_t reference_budget) {
    SweepResult result;
    for (const double te : eval_time_grid) {
        for (const double T : budget_grid) {
            if (T <= te) continue;  // an evaluation cannot fit
            SweepCell cell;
            cell.eval_time = te;
            cell.time_budget = T;
            cell.valid = true;
            bool all_afford_one = true;

            std::map<std::string, double> means;
            for (const auto& [name, runs] : logs) {
                double sum = 0.0;
                std::size_t count = 0;
                for (const auto& run : runs) {
                    std::vector<double> mt;
                    mt.reserve(run.history.size());
                    for (const auto& r : run.history.records) mt.push_back(r.model_time);
                    const std::size_t m_star = affordable_iterations(mt, te, T);
                    if (m_star >= reference_budget) cell.valid = false;
                    if (m_star == 0) {
                        all_afford_one = false;
                        continue;
                    }
                    sum += run.best_so_far[m_star - 1];
                    ++count;
                }
                if (count > 0) means[name] = sum / static_cast<double>(count);
            }

            if (!all_afford_one || means.empty()) {
                cell.valid = false;
                cell.winner_mean = std::numeric_limits<double>::quiet_NaN();
            } else {
                // map order is lexicographic, so ties keep the first name
                for (const auto& [name, mean] : means) {
                    if (cell.winner.empty() || mean < cell.winner_mean) {
                        cell.winner = name;
                        cell.winner_mean = mean;
                    } else if (mean == cell.winner_mean) {
                        cell.tie = true;
                    }
                }
            }
            result.cells.push_back(std::move(cell));
        }
    }
    if (result.cells.empty())
        result.diagnostic = "no grid cell has a time budget exceeding the evaluation time";
    return result;
}

std::vector<double> log_spaced(double lo, double hi, std::size_t n) {
    if (lo <= 0.0 || hi < lo || n < 1) throw ConfigError("log_spaced: need 0 < lo <= hi, n >= 1");
    std::vector<double> out;
    if (n == 1) {
        out.push_back(lo);
        return out;
    }
    const double step = (std::log(hi) - std::log(lo)) / static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i) out.push_back(std::exp(std::log(lo) + step * i));
    return out;
}

// ---------------------------------------------------------------------------
// Surface export
// ---------------------------------------------------------------------------

SurfaceGrid surface_export(const SurrogateStrategy& strategy, const Bounds& bounds,
                           std::size_t resolution) {
    if (bounds.dim() != 2) throw ConfigError("surface export requires a 2-d problem");
    if (resolution < 1) throw ConfigError("surface export: resolution must be >= 1");
    SurfaceGrid grid;
    const double l0 = bounds.lower(0), u0 = bounds.upper(0);
    const double l1 = bounds.lower(1), u1 = bounds.upper(1);
    for (std::size_t i = 0; i <= resolution; ++i) {
        const double x0 = l0 + (u0 - l0) * static_cast<double>(i) / resolution;
        for (std::size_t j = 0; j <= resolution; ++j) {
            const double x1 = l1 + (u1 - l1) * static_cast<double>(j) / resolution;
            const auto v = strategy.model_value({x0, x1});
            if (!v) throw ConfigError("strategy has no pointwise model to export");
            grid.rows.push_back({x0, x1, *v});
        }
    }
    return grid;
}

// ---------------------------------------------------------------------------
// CSV
// ---------------------------------------------------------------------------

namespace {

std::string fmt(double v) {
    std::ostringstream o;
    o.precision(17);
    o << v;
    return o.str();
}

std::ofstream open_out(const std::string& path) {
    const fs::path p(path);
    if (p.has_parent_path()) {
        std::error_code ec;
        fs::create_directories(p.parent_path(), ec);
    }
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot open for writing: " + path);
    return out;
}

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (const char c : line) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}

}  // namespace

void write_runs_csv(const std::string& path,
                    const std::map<std::string, std::vector<RunLog>>& runs) {
    auto out = open_out(path);
    out << "strategy,run_id,iteration,point,observed,best_so_far,model_time_s,eval_time_s\n";
    for (const auto& [name, logs] : runs) {
        for (std::size_t r = 0; r < logs.size(); ++r) {
            const auto& log = logs[r];
            for (std::size_t m = 0; m < log.history.size(); ++m) {
                const auto& rec = log.history.records[m];
                out << name << ',' << r << ',' << m << ',';
                for (std::size_t i = 0; i < rec.point.size(); ++i)
                    out << (i ? ";" : "") << rec.point[i];
                out << ',' << fmt(rec.observed) << ',' << fmt(log.best_so_far[m]) << ','
                    << fmt(rec.model_time) << ',' << fmt(rec.eval_time) << '\n';
            }
        }
    }
}

std::map<std::string, std::vector<RunLog>> read_runs_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open for reading: " + path);
    std::string line;
    if (!std::getline(in, line)) throw ConfigError("empty runs csv: " + path);

    std::map<std::string, std::map<std::size_t, RunLog>> grouped;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto cols = split(line, ',');
        if (cols.size() != 8) throw ConfigError("malformed runs csv row: " + line);
        const std::string& name = cols[0];
        const auto run_id = static_cast<std::size_t>(std::stoull(cols[1]));
        EvaluationRecord rec;
        for (const auto& tok : split(cols[3], ';')) rec.point.push_back(std::stoi(tok));
        rec.observed = std::stod(cols[4]);
        rec.model_time = std::stod(cols[6]);
        rec.eval_time = std::stod(cols[7]);
        auto& log = grouped[name][run_id];
        log.history.append(std::move(rec));
        log.best_so_far.push_back(std::stod(cols[5]));
        log.config_id = name + "/" + cols[1];
    }

    std::map<std::string, std::vector<RunLog>> out;
    for (auto& [name, by_run] : grouped)
        for (auto& [id, log] : by_run) out[name].push_back(std::move(log));
    return out;
}

void write_aggregates_csv(const std::string& path, const std::vector<AggregateSeries>& series) {
    auto out = open_out(path);
    out << "strategy,iteration,mean_best,std_best,mean_cum_model_time_s\n";
    for (const auto& agg : series)
        for (std::size_t m = 0; m < agg.mean_best.size(); ++m)
            out << agg.strategy << ',' << m << ',' << fmt(agg.mean_best[m]) << ','
                << fmt(agg.std_best[m]) << ',' << fmt(agg.mean_cum_model_time[m]) << '\n';
}

std::vector<AggregateSeries> read_aggregates_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open for reading: " + path);
    std::string line;
    if (!std::getline(in, line)) throw ConfigError("empty aggregates csv: " + path);
    std::map<std::string, AggregateSeries> grouped;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto cols = split(line, ',');
        if (cols.size() != 5) throw ConfigError("malformed aggregates csv row: " + line);
        auto& agg = grouped[cols[0]];
        agg.strategy = cols[0];
        agg.mean_best.push_back(std::stod(cols[2]));
        agg.std_best.push_back(std::stod(cols[3]));
        agg.mean_cum_model_time.push_back(std::stod(cols[4]));
    }
    std::vector<AggregateSeries> out;
    for (auto& [name, agg] : grouped) out.push_back(std::move(agg));
    return out;
}

void write_sweep_csv(const std::string& path, const SweepResult& sweep) {
    auto out = open_out(path);
    out << "eval_time_s,budget_s,winner,winner_mean_objective,valid\n";
    for (const auto& c : sweep.cells)
        out << fmt(c.eval_time) << ',' << fmt(c.time_budget) << ',' << c.winner << ','
            << fmt(c.winner_mean) << ',' << (c.valid ? 1 : 0) << '\n';
}

void write_surface_csv(const std::string& path, const SurfaceGrid& grid) {
    auto out = open_out(path);
    out << "x1,x2,model_value\n";
    for (const auto& row : grid.rows)
        out << fmt(row[0]) << ',' << fmt(row[1]) << ',' << fmt(row[2]) << '\n';
}

}  // namespace sbopt
