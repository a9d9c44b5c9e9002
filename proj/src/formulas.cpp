#include "segchain/formulas.hpp"

#include "segchain/errors.hpp"
#include "segchain/propagation.hpp"
#include "segchain/separation.hpp"
#include "segchain/zoo.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace segchain {

namespace {

void require_subunit(const Rational& p)
{
    if (sgn(p) < 0 || p >= 1)
        throw DomainError("p must lie in [0, 1), got " + to_string(p));
}

mpz_class floor_of(const Rational& q)
{
    mpz_class out;
    mpz_fdiv_q(out.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
    return out;
}

} // namespace

Rational nb_pmf(unsigned r, const Rational& p, std::uint64_t k)
{
    require_subunit(p);
    const Rational q = 1 - p;
    switch (r) {
    case 1:
        return power(p, k) * q;
    case 2:
        return Rational(mpz_class(std::to_string(k + 1))) * power(p, k) * q * q;
    default:
        throw DomainError("nb_pmf: r must be 1 or 2");
    }
}

Rational tv_nb(const Rational& p)
{
    require_subunit(p);
    mpz_class m = floor_of(p / (1 - p));
    if (!m.fits_ulong_p())
        throw DomainError("tv_nb: p too close to 1");
    const unsigned long mm = m.get_ui();
    return Rational(m + 1) * (1 - p) * power(p, mm + 1);
}

double f_A(double A, double x)
{
    return std::exp(-A / x) + std::exp(-A / (1 - x));
}

double f_sup(double A)
{
    if (!(A > 0))
        throw DomainError("f_sup: A must be positive");
    return std::max(std::exp(-A), 2 * std::exp(-2 * A));
}

double bd_p00_approx(std::size_t L, double alpha, std::size_t t)
{
    return 0.5 + 0.5 * bd_tv_approx(L, alpha, t);
}

double bd_tv_approx(std::size_t L, double alpha, std::size_t t)
{
    return std::pow(1 - 2 * alpha / static_cast<double>(L), static_cast<double>(t));
}

double bd_confine_approx(std::size_t k, double alpha, std::size_t t)
{
    return std::pow(1 - alpha / static_cast<double>(k + 1), static_cast<double>(t));
}

double best_constant_separation_bound(std::size_t L, double alpha, std::size_t T)
{
    const double A = alpha * static_cast<double>(T) / static_cast<double>(L + 1);
    if (A <= 0)
        return 2;
    return std::max(1.0, f_sup(A));
}

double kappa_target(std::size_t L, double delta)
{
    return std::exp(-(std::numbers::ln2 + delta) * static_cast<double>(L + 1) /
                    static_cast<double>(L));
}

KappaReport kappa_experiment(std::size_t L, double delta, std::size_t T,
                             const KappaOptions& options)
{
    auto inst = lower_bound_chain(L, delta, T);
    const auto& chain = inst.base.chain;
    KappaReport r{};
    r.L = L;
    r.delta = delta;
    r.T = T;
    r.alpha = inst.alpha;
    r.alpha_float = inst.alpha_float;
    r.x = inst.base.at("x");
    r.y = inst.base.at("y");
    r.target = kappa_target(L, delta);

    IntegerKernel kernel(chain);
    auto from_x = ScaledVector::point(chain.size(), r.x);
    auto from_y = ScaledVector::point(chain.size(), r.y);
    from_x.advance_steps(kernel, T, options.execution);
    from_y.advance_steps(kernel, T, options.execution);
    r.tv_exact = tv_distance(from_x, from_y);
    r.tv_kept = to_double(r.tv_exact);

    r.constants_below_one = true;
    for (std::size_t k = 0; k < L; ++k) {
        auto rep = constant_threshold_separation(chain, T, k, options.execution);
        if (k == 0 || rep.value > r.max_constant_separation) {
            r.max_constant_separation = rep.value;
            r.best_k = k;
        }
        if (rep.value >= 1)
            r.constants_below_one = false;
    }

    try {
        auto d = verify_duality(chain, r.x, r.y, T, options.duality);
        if (!d.holds)
            throw InvariantViolation("kappa_experiment: duality failed at L=" + std::to_string(L) +
                                     ", T=" + std::to_string(T));
        r.duality_verified = true;
        r.optimal_meeting = d.max_flow;
        r.meeting_certified = d.max_flow == 1;
        r.evidence = r.meeting_certified ? "duality: C_T = 1"
                                         : "duality: C_T = " + to_string(d.max_flow) + " < 1";
    } catch (const BudgetExceeded&) {
        r.duality_verified = false;
        r.meeting_certified = false;
        r.evidence = "constant-family evidence only";
    }
    return r;
}

std::vector<SweepRow> bd_asymptotics_sweep(std::size_t L, const Rational& alpha,
                                           std::vector<std::size_t> times, Execution exec)
{
    auto chain = birth_death_chain(L, alpha).chain;
    const double a = to_double(alpha);
    std::sort(times.begin(), times.end());
    times.erase(std::unique(times.begin(), times.end()), times.end());

    IntegerKernel kernel(chain);
    auto from0 = ScaledVector::point(L + 1, 0);
    auto fromL = ScaledVector::point(L + 1, L);
    std::vector<ScaledVector> confined;
    std::vector<StateSet> blocks;
    for (std::size_t k = 0; k < L; ++k) {
        StateSet block(L + 1);
        for (State s = 0; s <= k; ++s)
            block.insert(s);
        blocks.push_back(block);
        confined.push_back(ScaledVector::point(L + 1, 0));
    }

    const std::string base = "L=" + std::to_string(L) + ";alpha=" + to_string(alpha);
    std::vector<SweepRow> rows;
    auto emit = [&](std::string params, Rational exact, double approx) {
        double residual = to_double(exact) - approx;
        rows.push_back({std::move(params), std::move(exact), approx, residual});
    };

    std::size_t now = 0;
    for (std::size_t t : times) {
        for (; now < t; ++now) {
            from0.advance(kernel, exec);
            fromL.advance(kernel, exec);
            for (std::size_t k = 0; k < L; ++k)
                confined[k].advance_within(kernel, blocks[k], exec);
        }
        const std::string at = base + ";t=" + std::to_string(t);
        if (L >= 2) {
            Rational worst = 0;
            for (State i = 1; i < L; ++i)
                worst = std::max({worst, from0.at(i), fromL.at(L - i)});
            emit("quantity=interior_max;" + at, worst, 2 * a);
        }
        emit("quantity=p00;" + at, from0.at(0), bd_p00_approx(L, a, t));
        emit("quantity=tv;" + at, tv_distance(from0, fromL), bd_tv_approx(L, a, t));
        for (std::size_t k = 0; k < L; ++k)
            emit("quantity=confine;k=" + std::to_string(k) + ";" + at, confined[k].total(),
                 bd_confine_approx(k, a, t));
    }
    return rows;
}

std::vector<SweepRow> nb_sweep(const std::vector<Rational>& ps)
{
    std::vector<SweepRow> rows;
    for (auto& p : ps) {
        require_subunit(p);
        if (sgn(p) == 0)
            throw DomainError("nb_sweep: p must be positive");
        mpz_class m = floor_of(p / (1 - p));
        unsigned mm = std::max(1u, static_cast<unsigned>(m.get_ui()));
        auto nb = nb_chain(mm, p);
        const auto& chain = nb.zoo.chain;
        auto lx = limit_distribution(chain, Distribution::point(chain.size(), nb.zoo.at("x")));
        auto ly = limit_distribution(chain, Distribution::point(chain.size(), nb.zoo.at("y")));
        Rational exact = tv_distance(lx, ly);
        double approx = to_double(tv_nb(p));
        rows.push_back({"p=" + to_string(p) + ";m=" + std::to_string(mm), exact, approx,
                        to_double(exact) - approx});
    }
    return rows;
}

} // namespace segchain
