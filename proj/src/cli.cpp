#include "segchain/cli.hpp"

#include "segchain/chain_io.hpp"
#include "segchain/coupling_io.hpp"
#include "segchain/errors.hpp"
#include "segchain/formulas.hpp"
#include "segchain/fuzz.hpp"
#include "segchain/meetflow.hpp"
#include "segchain/zoo.hpp"

#include "CLI11.hpp"

#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <optional>
#include <sstream>

namespace segchain {

namespace {

using nlohmann::json;

enum class Format { text, csv };

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    void print(std::ostream& out, Format format) const
    {
        if (format == Format::csv) {
            auto line = [&](const std::vector<std::string>& cells) {
                for (std::size_t i = 0; i < cells.size(); ++i)
                    out << (i ? "," : "") << cells[i];
                out << '\n';
            };
            line(header);
            for (auto& r : rows)
                line(r);
            return;
        }
        std::vector<std::size_t> width(header.size());
        for (std::size_t i = 0; i < header.size(); ++i)
            width[i] = header[i].size();
        for (auto& r : rows)
            for (std::size_t i = 0; i < r.size(); ++i)
                width[i] = std::max(width[i], r[i].size());
        auto line = [&](const std::vector<std::string>& cells) {
            for (std::size_t i = 0; i < cells.size(); ++i) {
                out << (i ? "  " : "") << cells[i];
                if (i + 1 < cells.size())
                    out << std::string(width[i] - cells[i].size(), ' ');
            }
            out << '\n';
        };
        line(header);
        for (auto& r : rows)
            line(r);
    }
};

std::string num(double v)
{
    std::ostringstream os;
    os << std::setprecision(12) << v;
    return os.str();
}

std::string show(const Rational& q)
{
    return to_string(q) + " (" + num(to_double(q)) + ")";
}

std::uint64_t env_budget(const char* name, std::uint64_t fallback)
{
    const char* raw = std::getenv(name);
    if (!raw || !*raw)
        return fallback;
    char* end = nullptr;
    unsigned long long v = std::strtoull(raw, &end, 10);
    if (*end != '\0' || v == 0)
        throw ParseError(std::string(name) + " must be a positive integer, got \"" + raw + "\"");
    return v;
}

std::ofstream open_output(const std::string& path)
{
    std::ofstream f(path);
    if (!f)
        throw Error("cannot write " + path);
    return f;
}

void write_json(const std::string& path, const json& doc)
{
    auto f = open_output(path);
    f << doc.dump(2) << '\n';
}

std::optional<Designation> load_sidecar(const std::string& chain_file)
{
    auto side = sidecar_path(chain_file);
    if (!std::filesystem::exists(side))
        return std::nullopt;
    return designation_from_json(load_document(side));
}

State resolve_state(const MarkovChain& chain, const std::string& label, const std::string& role,
                    const std::string& chain_file)
{
    if (!label.empty())
        return chain.index_of(label);
    if (auto d = load_sidecar(chain_file)) {
        auto it = d->designated.find(role);
        if (it != d->designated.end())
            return chain.index_of(it->second);
    }
    throw ParseError("no --" + role + " given and no designated \"" + role + "\" in the sidecar");
}

Distribution parse_pi(const std::string& spec, std::size_t n)
{
    if (spec == "uniform")
        return Distribution::uniform(n);
    std::vector<Rational> w;
    std::stringstream ss(spec);
    std::string item;
    while (std::getline(ss, item, ','))
        w.push_back(parse_rational(item));
    if (w.size() != n)
        throw DimensionMismatch("--pi has " + std::to_string(w.size()) + " entries, chain has " +
                                std::to_string(n) + " states");
    return Distribution(std::move(w));
}

std::vector<Rational> parse_rational_list(const std::string& spec)
{
    std::vector<Rational> out;
    std::stringstream ss(spec);
    std::string item;
    while (std::getline(ss, item, ','))
        out.push_back(parse_rational(item));
    return out;
}

Table sweep_table(const std::vector<SweepRow>& rows)
{
    Table t{{"params", "exact", "approx", "residual"}, {}};
    for (auto& r : rows)
        t.rows.push_back({r.params, to_string(r.exact), num(r.approx), num(r.residual)});
    return t;
}

struct Options {
    std::string format = "text";
    bool parallel = false;

    std::string file;
    std::string x, y, from;
    std::size_t steps = 0;
    std::size_t T = 0;
    std::size_t k = 0;
    std::string pi = "uniform";
    std::size_t cap = 100000;
    std::uint64_t bound_n = 0;
    std::string bound_alpha;
    std::string out_path;
    std::string seq_path;
    std::string dump_path;
    std::string plan_path;
    bool nontrivial = false;

    std::string zoo_name;
    std::string p, alpha;
    unsigned m = 1;
    std::size_t L = 1;
    double delta = 0.05;
    bool layered = false;

    std::size_t instances = 200;
    std::size_t max_states = 3;
    std::size_t max_T = 4;
    std::uint64_t seed = 1;
    unsigned numerator_bound = 4;
    std::size_t t_max = 5000;
    std::size_t t_step = 500;
    std::string ps;
};

class Runner {
public:
    Runner(Options& o, std::ostream& out) : o_(o), out_(out) {}

    Format format() const { return o_.format == "csv" ? Format::csv : Format::text; }
    Execution exec() const { return o_.parallel ? Execution::parallel : Execution::serial; }

    std::size_t trajectory_cap() const
    {
        return env_budget("SEGCHAIN_TRAJECTORY_CAP", default_trajectory_cap);
    }
    std::uint64_t leaf_budget() const
    {
        return env_budget("SEGCHAIN_ENUM_BUDGET", std::uint64_t{1} << 26);
    }

    void emit(const Table& t)
    {
        if (!o_.out_path.empty()) {
            auto f = open_output(o_.out_path);
            t.print(f, Format::csv);
            out_ << "wrote " << t.rows.size() << " rows to " << o_.out_path << '\n';
            return;
        }
        t.print(out_, format());
    }

    // chain ---------------------------------------------------------------

    int chain_validate()
    {
        auto chain = load_chain(o_.file);
        std::size_t arcs = 0;
        for (State s = 0; s < chain.size(); ++s)
            arcs += chain.row(s).size();
        out_ << "valid chain: " << chain.size() << " states, " << arcs
             << " positive transitions\n";
        return exit_ok;
    }

    int chain_evolve()
    {
        auto chain = load_chain(o_.file);
        State s = resolve_state(chain, o_.from, "x", o_.file);
        auto d = evolve(chain, Distribution::point(chain.size(), s), o_.steps);
        Table t{{"state", "exact", "float"}, {}};
        for (State i = 0; i < chain.size(); ++i)
            t.rows.push_back({chain.label(i), to_string(d[i]), num(to_double(d[i]))});
        emit(t);
        return exit_ok;
    }

    int chain_tv()
    {
        auto chain = load_chain(o_.file);
        State x = resolve_state(chain, o_.x, "x", o_.file);
        State y = resolve_state(chain, o_.y, "y", o_.file);
        auto tv = tv_distance(evolve(chain, Distribution::point(chain.size(), x), o_.steps),
                              evolve(chain, Distribution::point(chain.size(), y), o_.steps));
        out_ << "tv(" << o_.steps << ") = " << show(tv) << '\n';
        return exit_ok;
    }

    int chain_dbar()
    {
        auto chain = load_chain(o_.file);
        out_ << "dbar(" << o_.steps << ") = " << show(d_bar(chain, o_.steps)) << '\n';
        return exit_ok;
    }

    int chain_tmix()
    {
        auto chain = load_chain(o_.file);
        auto pi = parse_pi(o_.pi, chain.size());
        out_ << "t_mix = " << mixing_time(chain, pi, o_.cap) << '\n';
        if (o_.bound_n > 0 && !o_.bound_alpha.empty())
            out_ << "coupling bound n*ceil(log(1/4)/log(1-alpha/2)) = "
                 << tmix_upper_bound(o_.bound_n, parse_rational(o_.bound_alpha)) << '\n';
        return exit_ok;
    }

    // coupling ------------------------------------------------------------

    int coupling_check()
    {
        auto kernel = load_coupling(o_.file);
        const auto& chain = kernel.chain();
        State x = resolve_state(chain, o_.x, "x", o_.file);
        State y = resolve_state(chain, o_.y, "y", o_.file);
        auto marg = check_marginals(kernel, x, y, o_.T);
        if (!marg.correct)
            throw InvariantViolation("marginals differ from the chain: " + marg.witness);
        auto agg = check_aggregate_marginals(kernel, x, y, o_.T);
        if (!agg.correct)
            throw InvariantViolation("aggregate conditions fail: " + agg.witness);
        out_ << "marginals: exact over horizon " << o_.T << '\n';
        auto f = check_faithful(kernel, PairState{x, y}, o_.T);
        out_ << "faithful: " << (f.faithful ? "yes" : "no") << '\n';
        if (f.witness)
            out_ << "witness: " << describe(*f.witness, chain) << '\n';
        return exit_ok;
    }

    int coupling_sticky()
    {
        auto kernel = load_coupling(o_.file);
        const auto& chain = kernel.chain();
        std::optional<PairState> start;
        if (!o_.x.empty() || !o_.y.empty())
            start = PairState{chain.index_of(o_.x), chain.index_of(o_.y)};
        auto sticky = make_sticky(kernel, start, o_.T);
        auto doc = coupling_to_json(sticky);
        if (o_.out_path.empty())
            out_ << doc.dump(2) << '\n';
        else {
            write_json(o_.out_path, doc);
            out_ << "wrote sticky coupling to " << o_.out_path << '\n';
        }
        return exit_ok;
    }

    int coupling_meet()
    {
        auto kernel = load_coupling(o_.file);
        const auto& chain = kernel.chain();
        auto mtd = meeting_time_distribution(kernel, resolve_state(chain, o_.x, "x", o_.file),
                                             resolve_state(chain, o_.y, "y", o_.file), o_.T);
        Table t{{"t", "cdf_exact", "cdf_float"}, {}};
        for (std::size_t i = 0; i < mtd.cdf.size(); ++i)
            t.rows.push_back({std::to_string(i), to_string(mtd.cdf[i]), num(to_double(mtd.cdf[i]))});
        emit(t);
        return exit_ok;
    }

    // separation ----------------------------------------------------------

    void print_report(const SeparationReport& r)
    {
        out_ << "separation = " << show(r.value) << '\n'
             << "summand_x = " << show(r.summand_x) << '\n'
             << "summand_y = " << show(r.summand_y) << '\n'
             << "nontrivial: " << (r.nontrivial ? "yes" : "no") << '\n';
    }

    int sep_value()
    {
        auto chain = load_chain(o_.file);
        State x = resolve_state(chain, o_.x, "x", o_.file);
        State y = resolve_state(chain, o_.y, "y", o_.file);
        auto seq = sequence_from_json(load_document(o_.seq_path), chain);
        print_report(separation_value(chain, x, y, seq));
        return exit_ok;
    }

    int sep_brute()
    {
        auto chain = load_chain(o_.file);
        State x = resolve_state(chain, o_.x, "x", o_.file);
        State y = resolve_state(chain, o_.y, "y", o_.file);
        BruteForceOptions bf;
        bf.restrict_nontrivial = o_.nontrivial;
        bf.leaf_budget = leaf_budget();
        bf.execution = exec();
        auto best = brute_force_optimal_separation(chain, x, y, o_.T, bf);
        if (!best) {
            out_ << "no non-trivial separating sequence exists\n";
            return exit_ok;
        }
        print_report(best->report);
        out_ << "leaves evaluated: " << best->leaves << '\n';
        auto doc = sequence_to_json(best->sequence, chain);
        if (o_.out_path.empty())
            out_ << "sequence: " << doc.dump() << '\n';
        else {
            write_json(o_.out_path, doc);
            out_ << "wrote sequence to " << o_.out_path << '\n';
        }
        return exit_ok;
    }

    int sep_constant()
    {
        auto chain = load_chain(o_.file);
        print_report(constant_threshold_separation(chain, o_.T, o_.k, exec()));
        return exit_ok;
    }

    // flow ----------------------------------------------------------------

    int flow_solve()
    {
        auto chain = load_chain(o_.file);
        State x = resolve_state(chain, o_.x, "x", o_.file);
        State y = resolve_state(chain, o_.y, "y", o_.file);
        auto net = build_flow_network(enumerate_trajectories(chain, x, o_.T, trajectory_cap()),
                                      enumerate_trajectories(chain, y, o_.T, trajectory_cap()),
                                      exec());
        auto flow = max_flow(net);
        out_ << "trajectories: " << net.xs().paths.size() << " x " << net.ys().paths.size()
             << ", middle arcs: " << net.middle().size() << '\n';
        out_ << "C_" << o_.T << " = " << show(flow.value) << '\n';
        if (!o_.dump_path.empty())
            write_json(o_.dump_path, network_to_json(net, chain, &flow));
        if (!o_.plan_path.empty()) {
            auto f = open_output(o_.plan_path);
            write_plan_csv(f, extract_coupling(net, flow), chain);
        }
        return exit_ok;
    }

    int flow_duality()
    {
        auto chain = load_chain(o_.file);
        State x = resolve_state(chain, o_.x, "x", o_.file);
        State y = resolve_state(chain, o_.y, "y", o_.file);
        DualityOptions d{trajectory_cap(), leaf_budget(), exec()};
        auto r = verify_duality(chain, x, y, o_.T, d);
        out_ << "C_" << o_.T << " = " << show(r.max_flow) << '\n'
             << "S_" << o_.T << " = " << show(r.separation) << '\n'
             << "meeting probability of extracted coupling = " << show(r.meeting) << '\n';
        if (!r.holds)
            throw InvariantViolation("duality fails: C_T = " + to_string(r.max_flow) +
                                     ", 2 - S_T = " + to_string(2 - r.separation) +
                                     ", measured meeting = " + to_string(r.meeting));
        out_ << "duality: C_T = 2 - S_T holds exactly\n";
        return exit_ok;
    }

    // zoo -----------------------------------------------------------------

    int zoo()
    {
        auto need = [&](const std::string& v, const char* flag) {
            if (v.empty())
                throw ParseError(std::string("zoo ") + o_.zoo_name + " needs " + flag);
            return parse_rational(v);
        };
        std::optional<ZooChain> zc;
        std::optional<MarkovianCouplingKernel> coupling;
        const std::string& name = o_.zoo_name;
        if (name == "two-state")
            zc = two_state_chain(need(o_.alpha, "--alpha"));
        else if (name == "haggstrom")
            zc = haggstrom_chain(need(o_.p, "--p"));
        else if (name == "nb") {
            auto nb = nb_chain(o_.m, need(o_.p, "--p"));
            zc = nb.zoo;
            coupling = nb.mimicking;
        } else if (name == "birth-death")
            zc = birth_death_chain(o_.L, need(o_.alpha, "--alpha"));
        else if (name == "lower-bound") {
            auto inst = lower_bound_chain(o_.L, o_.delta, o_.T);
            zc = inst.base;
            if (o_.layered) {
                auto lay = inst.layered();
                std::map<std::string, State> designated{
                    {"x", lay.index(zc->at("x"), 0)}, {"y", lay.index(zc->at("y"), 0)}};
                zc = ZooChain{lay.layered, designated, zc->params};
            }
        } else
            throw ParseError("unknown zoo chain \"" + name +
                             "\" (two-state, haggstrom, nb, birth-death, lower-bound)");

        if (o_.out_path.empty()) {
            write_chain(out_, zc->chain);
            return exit_ok;
        }
        {
            auto f = open_output(o_.out_path);
            write_chain(f, zc->chain);
        }
        write_json(sidecar_path(o_.out_path).string(), designation_to_json(zc->designation()));
        out_ << "wrote " << zc->chain.size() << "-state chain to " << o_.out_path << '\n';
        if (coupling) {
            auto cpath = std::filesystem::path(o_.out_path).replace_extension(".coupling.json");
            write_json(cpath.string(), coupling_to_json(*coupling));
            write_json(sidecar_path(cpath).string(), designation_to_json(zc->designation()));
            out_ << "wrote mimicking coupling to " << cpath.string() << '\n';
        }
        return exit_ok;
    }

    // experiments ---------------------------------------------------------

    int duality_fuzz()
    {
        FuzzOptions f;
        f.instances = o_.instances;
        f.max_states = o_.max_states;
        f.max_T = o_.max_T;
        f.seed = o_.seed;
        f.numerator_bound = o_.numerator_bound;
        f.execution = exec();
        f.duality = {trajectory_cap(), leaf_budget(), Execution::serial};
        auto results = run_duality_fuzz(f);
        std::size_t dual_ok = 0, bound_ok = 0;
        Table t{{"index", "states", "x", "y", "T", "max_flow", "separation", "meeting",
                 "duality", "bounds"},
                {}};
        for (auto& r : results) {
            dual_ok += r.duality_holds;
            bound_ok += r.bounds_hold;
            t.rows.push_back({std::to_string(r.index), std::to_string(r.states),
                              std::to_string(r.x), std::to_string(r.y), std::to_string(r.T),
                              to_string(r.max_flow), to_string(r.separation),
                              to_string(r.meeting), r.duality_holds ? "ok" : "FAIL",
                              r.bounds_hold ? "ok" : "FAIL"});
        }
        if (!o_.out_path.empty() || format() == Format::csv)
            emit(t);
        out_ << "instances: " << results.size() << ", exact duality: " << dual_ok
             << ", segregation bound: " << bound_ok << '\n';
        if (dual_ok != results.size() || bound_ok != results.size()) {
            for (auto& r : results)
                if (!r.duality_holds || !r.bounds_hold)
                    throw InvariantViolation("instance " + std::to_string(r.index) +
                                             ": C_T = " + to_string(r.max_flow) + ", S_T = " +
                                             to_string(r.separation) + ", meeting = " +
                                             to_string(r.meeting));
        }
        return exit_ok;
    }

    int kappa()
    {
        KappaOptions k;
        k.execution = exec();
        k.duality = {std::min<std::size_t>(trajectory_cap(), 20000),
                     std::min<std::uint64_t>(leaf_budget(), std::uint64_t{1} << 22), exec()};
        auto r = kappa_experiment(o_.L, o_.delta, o_.T, k);
        out_ << "L = " << r.L << ", delta = " << num(r.delta) << ", T = " << r.T << '\n'
             << "alpha = " << to_string(r.alpha) << " (formula value " << num(r.alpha_float)
             << ")\n"
             << "tv(T) = " << num(r.tv_kept) << ", target = " << num(r.target)
             << ", |diff| = " << num(std::abs(r.tv_kept - r.target)) << '\n'
             << "largest constant-threshold separation = "
             << num(to_double(r.max_constant_separation)) << " at k = " << r.best_k << '\n'
             << "all constant-threshold separations below 1: "
             << (r.constants_below_one ? "yes" : "no") << '\n'
             << "meeting certified: " << (r.meeting_certified ? "yes" : "no") << " ("
             << r.evidence << ")\n";
        return exit_ok;
    }

    int bd_asymptotics()
    {
        if (o_.t_step == 0)
            throw ParseError("--t-step must be positive");
        std::vector<std::size_t> times;
        for (std::size_t t = 0; t <= o_.t_max; t += o_.t_step)
            times.push_back(t);
        Rational alpha = parse_rational(o_.alpha.empty() ? "1/1000" : o_.alpha);
        emit(sweep_table(bd_asymptotics_sweep(o_.L, alpha, times, exec())));
        return exit_ok;
    }

    int nb()
    {
        emit(sweep_table(nb_sweep(parse_rational_list(o_.ps))));
        return exit_ok;
    }

private:
    Options& o_;
    std::ostream& out_;
};

} // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Exact analysis of segregating finite Markov chains", "segchain"};
    app.require_subcommand(1);
    app.fallthrough();
    Options o;
    app.add_option("--format", o.format, "Output format for tables")
        ->check(CLI::IsMember({"text", "csv"}));
    app.add_flag("--parallel", o.parallel, "Use the OpenMP kernels");

    auto file = [&](CLI::App* c, const char* what = "Chain file") {
        c->add_option("file", o.file, what)->required();
    };
    auto pair = [&](CLI::App* c) {
        c->add_option("--x", o.x, "Start state of the first copy");
        c->add_option("--y", o.y, "Start state of the second copy");
    };
    auto horizon = [&](CLI::App* c) { c->add_option("--T", o.T, "Horizon")->required(); };
    auto output = [&](CLI::App* c) { c->add_option("--out", o.out_path, "Output file"); };

    auto* chain = app.add_subcommand("chain", "Chain utilities");
    chain->require_subcommand(1);
    auto* c_validate = chain->add_subcommand("validate", "Validate a chain file");
    file(c_validate);
    auto* c_evolve = chain->add_subcommand("evolve", "P^n(x, .)");
    file(c_evolve);
    c_evolve->add_option("--from", o.from, "Start state");
    c_evolve->add_option("--steps", o.steps, "n")->required();
    output(c_evolve);
    auto* c_tv = chain->add_subcommand("tv", "|| P^n(x,.) - P^n(y,.) ||");
    file(c_tv);
    pair(c_tv);
    c_tv->add_option("--steps", o.steps, "n")->required();
    auto* c_dbar = chain->add_subcommand("dbar", "max over pairs of the TV after n steps");
    file(c_dbar);
    c_dbar->add_option("--steps", o.steps, "n")->required();
    auto* c_tmix = chain->add_subcommand("tmix", "Mixing time against a supplied pi");
    file(c_tmix);
    c_tmix->add_option("--pi", o.pi, "\"uniform\" or comma-separated rationals");
    c_tmix->add_option("--cap", o.cap, "Search cap");
    c_tmix->add_option("--bound-n", o.bound_n, "n for the coupling bound");
    c_tmix->add_option("--bound-alpha", o.bound_alpha, "alpha for the coupling bound");

    auto* coupling = app.add_subcommand("coupling", "Markovian couplings");
    coupling->require_subcommand(1);
    auto* k_check = coupling->add_subcommand("check", "Marginals and faithfulness");
    file(k_check, "Coupling file");
    pair(k_check);
    horizon(k_check);
    auto* k_sticky = coupling->add_subcommand("sticky", "Sticky transformation");
    file(k_sticky, "Coupling file");
    pair(k_sticky);
    k_sticky->add_option("--T", o.T, "Horizon for the reachability check");
    output(k_sticky);
    auto* k_meet = coupling->add_subcommand("meet", "Meeting-time CDF");
    file(k_meet, "Coupling file");
    pair(k_meet);
    horizon(k_meet);
    output(k_meet);

    auto* sep = app.add_subcommand("sep", "Separating sequences");
    sep->require_subcommand(1);
    auto* s_value = sep->add_subcommand("value", "Separation of a given sequence");
    file(s_value);
    pair(s_value);
    s_value->add_option("--seq", o.seq_path, "Sequence file")->required();
    auto* s_brute = sep->add_subcommand("brute", "Exhaustive optimal separation");
    file(s_brute);
    pair(s_brute);
    horizon(s_brute);
    s_brute->add_flag("--nontrivial", o.nontrivial, "Only non-trivial sequences");
    output(s_brute);
    auto* s_const = sep->add_subcommand("constant", "Constant threshold {0..k}");
    file(s_const);
    horizon(s_const);
    s_const->add_option("--k", o.k, "Threshold")->required();

    auto* flow = app.add_subcommand("flow", "Trajectory flow network");
    flow->require_subcommand(1);
    auto* f_solve = flow->add_subcommand("solve", "Optimal meeting probability");
    file(f_solve);
    pair(f_solve);
    horizon(f_solve);
    f_solve->add_option("--dump", o.dump_path, "Write the network as JSON");
    f_solve->add_option("--plan", o.plan_path, "Write the optimal coupling as CSV");
    auto* f_dual = flow->add_subcommand("duality", "Check C_T = 2 - S_T");
    file(f_dual);
    pair(f_dual);
    horizon(f_dual);

    auto* zoo = app.add_subcommand("zoo", "Write a named chain");
    zoo->add_option("name", o.zoo_name, "two-state | haggstrom | nb | birth-death | lower-bound")
        ->required();
    zoo->add_option("--p", o.p, "p");
    zoo->add_option("--alpha", o.alpha, "alpha");
    zoo->add_option("--m", o.m, "m");
    zoo->add_option("--L", o.L, "L");
    zoo->add_option("--delta", o.delta, "delta");
    zoo->add_option("--T", o.T, "T");
    zoo->add_flag("--layered", o.layered, "Write the time-layered chain");
    output(zoo);

    auto* exp = app.add_subcommand("experiment", "Reproduction recipes");
    exp->require_subcommand(1);
    auto* e_fuzz = exp->add_subcommand("duality-fuzz", "Random instances of C_T = 2 - S_T");
    e_fuzz->add_option("--instances", o.instances, "Instance count");
    e_fuzz->add_option("--max-states", o.max_states, "Largest state count");
    e_fuzz->add_option("--max-T", o.max_T, "Largest horizon");
    e_fuzz->add_option("--seed", o.seed, "Seed");
    e_fuzz->add_option("--bound", o.numerator_bound, "Largest kernel numerator");
    output(e_fuzz);
    auto* e_kappa = exp->add_subcommand("kappa", "Lower-bound construction");
    e_kappa->add_option("--L", o.L, "L")->required();
    e_kappa->add_option("--delta", o.delta, "delta");
    e_kappa->add_option("--T", o.T, "T")->required();
    auto* e_bd = exp->add_subcommand("bd-asymptotics", "Birth-and-death leading terms");
    e_bd->add_option("--L", o.L, "L")->required();
    e_bd->add_option("--alpha", o.alpha, "alpha");
    e_bd->add_option("--t-max", o.t_max, "Largest t");
    e_bd->add_option("--t-step", o.t_step, "Grid step");
    output(e_bd);
    auto* e_nb = exp->add_subcommand("nb-sweep", "NB total variation");
    e_nb->add_option("--p", o.ps, "Comma-separated rationals")->required();
    output(e_nb);

    std::vector<const char*> argv{"segchain"};
    for (auto& a : args)
        argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return exit_ok;
    } catch (const CLI::CallForAllHelp& e) {
        out << app.help("", CLI::AppFormatMode::All);
        return exit_ok;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return exit_parse;
    }

    Runner run(o, out);
    try {
        if (*c_validate) return run.chain_validate();
        if (*c_evolve) return run.chain_evolve();
        if (*c_tv) return run.chain_tv();
        if (*c_dbar) return run.chain_dbar();
        if (*c_tmix) return run.chain_tmix();
        if (*k_check) return run.coupling_check();
        if (*k_sticky) return run.coupling_sticky();
        if (*k_meet) return run.coupling_meet();
        if (*s_value) return run.sep_value();
        if (*s_brute) return run.sep_brute();
        if (*s_const) return run.sep_constant();
        if (*f_solve) return run.flow_solve();
        if (*f_dual) return run.flow_duality();
        if (*zoo) return run.zoo();
        if (*e_fuzz) return run.duality_fuzz();
        if (*e_kappa) return run.kappa();
        if (*e_bd) return run.bd_asymptotics();
        if (*e_nb) return run.nb();
    } catch (const ParseError& e) {
        err << "parse error: " << e.what() << '\n';
        return exit_parse;
    } catch (const BudgetExceeded& e) {
        err << "budget exceeded: " << e.what() << '\n';
        return exit_budget;
    } catch (const InvariantViolation& e) {
        err << "invariant violated: " << e.what() << '\n';
        return exit_invariant;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return exit_failure;
    }
    err << "error: no command given\n";
    return exit_parse;
}

} // namespace segchain
