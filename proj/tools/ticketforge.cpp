// ticketforge: construct strong lottery tickets from dense feed-forward
// targets via subset-sum pruning of a random source network.
#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "ticketforge/construct.hpp"
#include "ticketforge/io.hpp"
#include "ticketforge/sample.hpp"
#include "ticketforge/verify.hpp"

using namespace ticketforge;

namespace {

void emit(const std::string& text, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << text;
        return;
    }
    write_text(out_path, text);
}

std::string csv_escape(const std::string& s) { return s; }

std::vector<std::size_t> parse_arch(const std::string& s) {
    std::vector<std::size_t> arch;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ','))
        arch.push_back(static_cast<std::size_t>(std::stoull(item)));
    if (arch.size() < 2) throw DomainError("--arch needs at least two comma-separated widths");
    return arch;
}

std::vector<double> parse_grid(const std::string& s) {
    std::vector<double> grid;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) grid.push_back(std::stod(item));
    if (grid.empty()) throw DomainError("empty grid");
    return grid;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"ticketforge: strong lottery ticket construction"};
    app.require_subcommand(1);

    // gen-target
    auto* gen = app.add_subcommand("gen-target", "generate a random sparse target model");
    std::string gen_arch = "4,8,8,2", gen_act = "relu", gen_out;
    double gen_sparsity = 0.5;
    uint64_t gen_seed = 0;
    gen->add_option("--arch", gen_arch, "comma-separated widths, e.g. 4,8,8,2");
    gen->add_option("--activation", gen_act, "relu|lrelu:<alpha>|tanh|sigmoid|linear");
    gen->add_option("--sparsity", gen_sparsity, "fraction of parameters zeroed")
        ->check(CLI::Range(0.0, 1.0));
    gen->add_option("--seed", gen_seed);
    gen->add_option("--out", gen_out, "output path (default stdout)");

    // construct
    auto* con = app.add_subcommand("construct", "build a ticket for a target model");
    std::string con_model, con_mode = "l+1", con_out;
    double con_eps = 0.05, con_delta = 0.05;
    int con_pool = 10, con_attempts = 3;
    uint64_t con_seed = 0;
    con->add_option("--model", con_model, "target model JSON")->required();
    con->add_option("--mode", con_mode)->check(CLI::IsMember({"l+1", "2l"}));
    con->add_option("--eps", con_eps, "sup-norm error budget");
    con->add_option("--delta", con_delta, "failure probability budget");
    con->add_option("--pool", con_pool, "subset-sum pool size m");
    con->add_option("--attempts", con_attempts, "retry waves per block");
    con->add_option("--seed", con_seed);
    con->add_option("--out", con_out, "ticket output path (default stdout)");

    // verify
    auto* ver = app.add_subcommand("verify", "measure and audit a ticket against its target");
    std::string ver_model, ver_ticket, ver_out, ver_format = "json";
    std::size_t ver_samples = 2000;
    uint64_t ver_seed = 0;
    ver->add_option("--model", ver_model)->required();
    ver->add_option("--ticket", ver_ticket)->required();
    ver->add_option("--samples", ver_samples);
    ver->add_option("--seed", ver_seed);
    ver->add_option("--format", ver_format)->check(CLI::IsMember({"json", "csv"}));
    ver->add_option("--out", ver_out);

    // budget
    auto* bud = app.add_subcommand("budget", "per-layer error budget for a target");
    std::string bud_model, bud_out, bud_format = "json";
    double bud_eps = 0.05;
    bud->add_option("--model", bud_model)->required();
    bud->add_option("--eps", bud_eps);
    bud->add_option("--format", bud_format)->check(CLI::IsMember({"json", "csv"}));
    bud->add_option("--out", bud_out);

    // widths
    auto* wid = app.add_subcommand("widths", "theoretical source width requirements");
    std::string wid_arch = "4,8,8,2", wid_mode = "full_L_plus_1", wid_out, wid_format = "json";
    double wid_eps = 0.05, wid_delta = 0.05, wid_C = 1.0, wid_gamma = 0.1;
    wid->add_option("--arch", wid_arch);
    wid->add_option("--eps", wid_eps);
    wid->add_option("--delta", wid_delta);
    wid->add_option("--mode", wid_mode)
        ->check(CLI::IsMember({"two_for_one", "one_for_one", "full_L_plus_1"}));
    wid->add_option("--C", wid_C);
    wid->add_option("--gamma", wid_gamma);
    wid->add_option("--format", wid_format)->check(CLI::IsMember({"json", "csv"}));
    wid->add_option("--out", wid_out);

    // bench-subsetsum
    auto* ben = app.add_subcommand("bench-subsetsum", "Monte-Carlo success rates");
    std::string ben_dist = "uniform", ben_eps_grid = "0.1,0.01,0.001", ben_m_grid = "5,10,15,20";
    std::string ben_out, ben_format = "csv";
    int ben_trials = 10000;
    uint64_t ben_seed = 0;
    ben->add_option("--dist", ben_dist)->check(CLI::IsMember({"uniform", "product"}));
    ben->add_option("--eps-grid", ben_eps_grid, "comma-separated tolerances");
    ben->add_option("--m-grid", ben_m_grid, "comma-separated pool sizes");
    ben->add_option("--trials", ben_trials);
    ben->add_option("--seed", ben_seed);
    ben->add_option("--format", ben_format)->check(CLI::IsMember({"json", "csv"}));
    ben->add_option("--out", ben_out);

    // compare
    auto* cmp = app.add_subcommand("compare", "build both modes and compare");
    std::string cmp_model, cmp_out, cmp_format = "json";
    double cmp_eps = 0.05, cmp_delta = 0.05;
    int cmp_pool = 10, cmp_attempts = 3;
    std::size_t cmp_samples = 2000;
    uint64_t cmp_seed = 0;
    cmp->add_option("--model", cmp_model)->required();
    cmp->add_option("--eps", cmp_eps);
    cmp->add_option("--delta", cmp_delta);
    cmp->add_option("--pool", cmp_pool);
    cmp->add_option("--attempts", cmp_attempts);
    cmp->add_option("--samples", cmp_samples);
    cmp->add_option("--seed", cmp_seed);
    cmp->add_option("--format", cmp_format)->check(CLI::IsMember({"json", "csv"}));
    cmp->add_option("--out", cmp_out);

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed()) {
            Network net = gen_target(parse_arch(gen_arch), gen_act, gen_sparsity, gen_seed);
            emit(canonical_dump(model_to_json(net)), gen_out);
        } else if (con->parsed()) {
            Network target = load_model(con_model);
            ConstructConfig cfg;
            cfg.eps = con_eps;
            cfg.delta = con_delta;
            cfg.m = con_pool;
            cfg.attempts = con_attempts;
            cfg.seed = con_seed;
            Ticket t = construct(target, cfg, con_mode);
            emit(canonical_dump(ticket_to_json(t)), con_out);
        } else if (ver->parsed()) {
            Network target = load_model(ver_model);
            Ticket t = load_ticket(ver_ticket);
            VerificationReport rep = audit(t);
            rep.sup_error = sup_error(target, t, ver_samples, ver_seed);
            rep.samples = ver_samples;
            rep.seed = ver_seed;
            std::string text;
            if (ver_format == "csv") {
                std::ostringstream os;
                os << "sup_error,samples,params,max_width,depth,attempted,achieved,failed,"
                      "flags\n";
                os << rep.sup_error << ',' << rep.samples << ',' << rep.stats.param_count << ','
                   << rep.stats.max_width << ',' << rep.stats.depth << ',' << rep.attempted
                   << ',' << rep.achieved << ',' << rep.failed << ',' << rep.flags.size()
                   << '\n';
                text = os.str();
            } else {
                json j{{"sup_error", rep.sup_error},
                       {"samples", rep.samples},
                       {"seed", rep.seed},
                       {"layer_worst_residual", rep.layer_worst_residual},
                       {"params", rep.stats.param_count},
                       {"max_width", rep.stats.max_width},
                       {"depth", rep.stats.depth},
                       {"attempted", rep.attempted},
                       {"achieved", rep.achieved},
                       {"failed", rep.failed},
                       {"flags", rep.flags}};
                text = canonical_dump(j);
            }
            emit(text, ver_out);
            if (!rep.flags.empty() || rep.failed > 0 || rep.sup_error > t.manifest.eps)
                return 2;
        } else if (bud->parsed()) {
            Network target = load_model(bud_model);
            ErrorBudget b = error_budget(target, bud_eps);
            check_budget(b);
            std::string text;
            if (bud_format == "csv") {
                std::ostringstream os;
                os << "layer,eps_l,M,W_inf\n";
                for (std::size_t l = 0; l < b.eps_l.size(); ++l)
                    os << (l + 1) << ',' << b.eps_l[l] << ',' << b.M[l] << ',' << b.W_inf[l]
                       << '\n';
                text = os.str();
            } else {
                json j{{"eps", b.eps}, {"eps_l", b.eps_l}, {"M", b.M},
                       {"W_inf", b.W_inf}, {"T", b.T},     {"L", b.L}};
                text = canonical_dump(j);
            }
            emit(text, bud_out);
        } else if (wid->parsed()) {
            WidthReport rep =
                width_bounds(parse_arch(wid_arch), wid_eps, wid_delta, wid_mode, wid_C,
                             wid_gamma);
            std::string text;
            if (wid_format == "csv") {
                std::ostringstream os;
                os << "layer,width\n";
                for (std::size_t l = 0; l < rep.widths.size(); ++l)
                    os << (l + 1) << ',' << rep.widths[l] << '\n';
                text = os.str();
            } else {
                json j{{"mode", rep.mode}, {"widths", rep.widths}, {"rho", rep.rho},
                       {"C", rep.C},       {"gamma", rep.gamma},   {"eps", rep.eps},
                       {"delta", rep.delta}};
                text = canonical_dump(j);
            }
            emit(text, wid_out);
        } else if (ben->parsed()) {
            Sampler dist = ben_dist == "product" ? product_sampler() : uniform_sampler();
            std::vector<double> eps_grid = parse_grid(ben_eps_grid);
            std::vector<double> m_grid = parse_grid(ben_m_grid);
            json rows = json::array();
            std::ostringstream os;
            os << "distribution,m,eps,trials,successes,rate\n";
            for (double md : m_grid) {
                int m = static_cast<int>(md);
                for (double eps : eps_grid) {
                    double rate =
                        success_rate(dist, m, eps, uniform_sampler(), ben_trials, ben_seed);
                    int successes = static_cast<int>(std::lround(rate * ben_trials));
                    os << csv_escape(ben_dist) << ',' << m << ',' << eps << ',' << ben_trials
                       << ',' << successes << ',' << rate << '\n';
                    rows.push_back(json{{"distribution", ben_dist},
                                        {"m", m},
                                        {"eps", eps},
                                        {"trials", ben_trials},
                                        {"successes", successes},
                                        {"rate", rate}});
                }
            }
            emit(ben_format == "csv" ? os.str() : canonical_dump(rows), ben_out);
        } else if (cmp->parsed()) {
            Network target = load_model(cmp_model);
            ConstructConfig cfg;
            cfg.eps = cmp_eps;
            cfg.delta = cmp_delta;
            cfg.m = cmp_pool;
            cfg.attempts = cmp_attempts;
            cfg.seed = cmp_seed;
            auto results = compare_modes(target, cfg, cmp_samples);
            std::string text;
            if (cmp_format == "csv") {
                std::ostringstream os;
                os << "mode,error,params,max_width,depth,wall_ms\n";
                for (const ModeResult& r : results)
                    os << r.mode << ',' << r.error << ',' << r.params << ',' << r.max_width
                       << ',' << r.depth << ',' << r.wall_ms << '\n';
                text = os.str();
            } else {
                json rows = json::array();
                for (const ModeResult& r : results)
                    rows.push_back(json{{"mode", r.mode},
                                        {"error", r.error},
                                        {"params", r.params},
                                        {"max_width", r.max_width},
                                        {"depth", r.depth},
                                        {"wall_ms", r.wall_ms}});
                text = canonical_dump(rows);
            }
            emit(text, cmp_out);
        }
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return e.exit_code();
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
