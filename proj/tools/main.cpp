// pellsum: experiments around Pell-equation solution statistics and
// incomplete Kloosterman-type sums with squared inverses.
//
// Subcommands stream rows as JSON lines (default) or CSV. All sampling is
// seeded, so identical invocations produce identical bytes.

#include <algorithm>
#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "pellsum/amplify.hpp"
#include "pellsum/expsum.hpp"
#include "pellsum/factor.hpp"
#include "pellsum/fouvry.hpp"
#include "pellsum/pell.hpp"

using nlohmann::ordered_json;

namespace {

std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

// JSON lines stream straight through; CSV buffers so the header can be the
// union of all row keys (subcommands with meta/sample/summary rows would
// otherwise lose columns). Doubles render at 17 significant digits.
class RowWriter {
public:
    RowWriter(const std::string& out_path, std::string format) : format_(std::move(format)) {
        if (!out_path.empty()) {
            file_.open(out_path, std::ios::trunc);
            if (!file_) throw pellsum::RangeError("cannot open output path: " + out_path);
            os_ = &file_;
        } else {
            os_ = &std::cout;
        }
    }

    ~RowWriter() { flush_csv(); }

    RowWriter(const RowWriter&) = delete;
    RowWriter& operator=(const RowWriter&) = delete;

    void row(const ordered_json& j) {
        if (format_ == "json") {
            (*os_) << j.dump() << "\n";
            return;
        }
        for (auto it = j.begin(); it != j.end(); ++it) {
            if (std::find(cols_.begin(), cols_.end(), it.key()) == cols_.end())
                cols_.push_back(it.key());
        }
        rows_.push_back(j);
    }

private:
    void flush_csv() {
        if (format_ != "csv" || cols_.empty()) return;
        for (std::size_t i = 0; i < cols_.size(); ++i) (*os_) << (i ? "," : "") << cols_[i];
        (*os_) << "\n";
        for (const auto& j : rows_) {
            for (std::size_t i = 0; i < cols_.size(); ++i) {
                if (i) (*os_) << ",";
                if (!j.contains(cols_[i])) continue;
                const auto& v = j.at(cols_[i]);
                if (v.is_number_float()) (*os_) << fmt_double(v.get<double>());
                else if (v.is_string()) (*os_) << v.get<std::string>();
                else (*os_) << v.dump();
            }
            (*os_) << "\n";
        }
        rows_.clear();
        cols_.clear();
    }

    std::string format_;
    std::ofstream file_;
    std::ostream* os_ = nullptr;
    std::vector<std::string> cols_;
    std::vector<ordered_json> rows_;
};

struct CommonOpts {
    std::string out_path;
    std::string format = "json";
    std::uint64_t budget = pellsum::expsum::kDefaultBudget;
    std::uint64_t seed = 0x5EED5EED5EEDULL;
};

void add_common(CLI::App* cmd, CommonOpts& common) {
    cmd->add_option("--out", common.out_path, "output path (default stdout)");
    cmd->add_option("--format", common.format, "json|csv")
        ->check(CLI::IsMember({"json", "csv"}));
    cmd->add_option("--budget", common.budget, "operation budget cap");
    cmd->add_option("--seed", common.seed, "seed for sampled experiments");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Pell solution counting and squared-inverse Kloosterman sum experiments"};
    app.require_subcommand(1);

    CommonOpts common;

    // ---- pell-table ----
    std::uint64_t dmin = 2, dmax = 2;
    auto* cmd_pell = app.add_subcommand("pell-table", "fundamental solutions over a D range");
    cmd_pell->add_option("--dmin", dmin, "first discriminant")->default_val(2);
    cmd_pell->add_option("--dmax", dmax, "last discriminant")->required();
    add_common(cmd_pell, common);

    // ---- hooley-compare ----
    std::vector<std::uint64_t> xs;
    double hc_alpha = 0.5;
    auto* cmd_hooley = app.add_subcommand("hooley-compare", "fundamental count vs main term");
    cmd_hooley->add_option("--x", xs, "range cutoffs")->required();
    cmd_hooley->add_option("--alpha", hc_alpha, "exponent alpha")->required();
    add_common(cmd_hooley, common);

    // ---- kloosterman ----
    std::uint64_t kq = 0, kn = 0;
    std::int64_t ka = 1;
    std::vector<std::uint64_t> kexclude;
    auto* cmd_kloos = app.add_subcommand("kloosterman", "one incomplete squared-inverse sum");
    cmd_kloos->add_option("--q", kq, "modulus")->required();
    cmd_kloos->add_option("--a", ka, "residue")->required();
    cmd_kloos->add_option("--n", kn, "range bound N <= q")->required();
    cmd_kloos->add_option("--exclude", kexclude, "excluded x values");
    add_common(cmd_kloos, common);

    // ---- exceptional-set ----
    std::uint64_t en = 0;
    double ebeta = 0.05;
    std::uint32_t er = 3;
    bool eno_spacing = false, estrict = false, elist = false;
    auto* cmd_exc = app.add_subcommand("exceptional-set", "ill-factored integers up to N");
    cmd_exc->add_option("--n", en, "range bound")->required();
    cmd_exc->add_option("--beta", ebeta, "smoothness exponent")->required();
    cmd_exc->add_option("--r", er, "required well-spaced prime factors")->required();
    cmd_exc->add_flag("--no-spacing", eno_spacing, "drop the spacing condition");
    cmd_exc->add_flag("--strict", estrict, "also test p_r against the cofactor");
    cmd_exc->add_flag("--list", elist, "emit one row per member");
    add_common(cmd_exc, common);

    // ---- partition-check ----
    std::uint64_t pn = 0, pq = 0;
    double pbeta = 0.1;
    std::uint32_t pr = 3;
    std::int64_t pa = 1;
    auto* cmd_part = app.add_subcommand("partition-check", "direct sum vs box decomposition");
    cmd_part->add_option("--n", pn, "range bound")->required();
    cmd_part->add_option("--beta", pbeta, "smoothness exponent")->required();
    cmd_part->add_option("--r", pr, "box dimension count")->required();
    cmd_part->add_option("--q", pq, "modulus")->required();
    cmd_part->add_option("--a", pa, "residue")->required();
    add_common(cmd_part, common);

    // ---- lemma2 ----
    std::uint32_t lell = 2;
    std::vector<std::uint64_t> lms;
    auto* cmd_l2 = app.add_subcommand("lemma2", "reciprocal square-sum collision counts");
    cmd_l2->add_option("--ell", lell, "tuples have length 2*ell")->required();
    cmd_l2->add_option("--m", lms, "per-slot M: primes drawn from (M/2, M]")->required();
    add_common(cmd_l2, common);

    // ---- amplify-check ----
    std::uint64_t aq = 0;
    std::int64_t aa = 1;
    double arho = 0.5, abeta = 0.05;
    std::vector<double> abetai;
    auto* cmd_amp = app.add_subcommand("amplify-check", "moment amplification inequality report");
    cmd_amp->add_option("--q", aq, "modulus")->required();
    cmd_amp->add_option("--a", aa, "residue")->required();
    cmd_amp->add_option("--rho", arho, "N = q^rho")->required();
    cmd_amp->add_option("--beta", abeta, "base exponent")->required();
    cmd_amp->add_option("--beta-i", abetai, "interval exponents (M_i = q^{beta_i}/2)")->required();
    add_common(cmd_amp, common);

    // ---- cancellation ----
    std::uint64_t cq = 0;
    double crho = 0.55, cbeta = 0.05;
    std::uint32_t cr = 3, csamples = 50;
    auto* cmd_canc = app.add_subcommand("cancellation", "restricted-sum cancellation measurement");
    cmd_canc->add_option("--q", cq, "modulus")->required();
    cmd_canc->add_option("--rho", crho, "N = ceil(q^rho)")->required();
    cmd_canc->add_option("--beta", cbeta, "smoothness exponent")->required();
    cmd_canc->add_option("--r", cr, "well-spaced prime factor count")->required();
    cmd_canc->add_option("--samples", csamples, "number of sampled residues a")->required();
    add_common(cmd_canc, common);

    // ---- coefficients ----
    std::vector<double> coeff_alphas;
    auto* cmd_coef = app.add_subcommand("coefficients", "conjectured and proved coefficient table");
    cmd_coef->add_option("--alpha", coeff_alphas, "alpha values")->required();
    add_common(cmd_coef, common);

    // ---- region-term ----
    std::uint64_t rx = 0, ru = 1;
    double ralpha = 0.5;
    auto* cmd_reg = app.add_subcommand("region-term", "admissible-region lattice main term");
    cmd_reg->add_option("--x", rx, "range cutoff")->required();
    cmd_reg->add_option("--alpha", ralpha, "exponent alpha")->required();
    cmd_reg->add_option("--u", ru, "u for the Y range parameters")->default_val(1);
    add_common(cmd_reg, common);

    // ---- probe-trilinear ----
    std::uint64_t tu1min = 0, tu1max = 0, tu2min = 0, tu2max = 0, thmax = 0, tx = 0;
    double tbeta = 0.05, teps = 0.01, talpha = 0.0;
    std::uint32_t tr = 2;
    auto* cmd_probe = app.add_subcommand("probe-trilinear", "restricted inner-sum scatter");
    cmd_probe->add_option("--u1min", tu1min)->required();
    cmd_probe->add_option("--u1max", tu1max)->required();
    cmd_probe->add_option("--u2min", tu2min)->required();
    cmd_probe->add_option("--u2max", tu2max)->required();
    cmd_probe->add_option("--beta", tbeta, "smoothness exponent")->required();
    cmd_probe->add_option("--r", tr, "well-spaced prime factor count")->required();
    cmd_probe->add_option("--hmax", thmax, "frequency cutoff (overrides --x/--alpha/--eps)");
    cmd_probe->add_option("--x", tx, "derive hmax = x^(alpha - 1/2 + eps)");
    cmd_probe->add_option("--alpha", talpha, "exponent for the derived hmax");
    cmd_probe->add_option("--eps", teps, "epsilon in the derived hmax")->default_val(0.01);
    add_common(cmd_probe, common);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        RowWriter out(common.out_path, common.format);

        if (cmd_pell->parsed()) {
            if (dmin < 2) throw pellsum::RangeError("pell-table: dmin must be >= 2");
            for (std::uint64_t D = dmin; D <= dmax; ++D) {
                std::uint64_t root = 0;
                if (pellsum::is_square_u64(D, &root)) continue;
                auto sol = pellsum::pell::fundamental_solution(D);
                out.row({{"D", D},
                         {"t", sol.t.get_str()},
                         {"u", sol.u.get_str()},
                         {"eps_log", sol.eps_log}});
            }
        } else if (cmd_hooley->parsed()) {
            for (std::uint64_t x : xs) {
                auto c = pellsum::pell::count_solutions(x, hc_alpha);
                out.row({{"x", x},
                         {"alpha", hc_alpha},
                         {"S_f", c.count_fundamental},
                         {"main_term", c.main_term},
                         {"ratio", static_cast<double>(c.count_fundamental) / c.main_term}});
            }
        } else if (cmd_kloos->parsed()) {
            pellsum::expsum::IntSet excl(kexclude.begin(), kexclude.end());
            pellsum::expsum::KloostermanQuery query;
            query.q = kq;
            query.a = ka;
            query.N = kn;
            query.excluded = excl.empty() ? nullptr : &excl;
            auto v = pellsum::expsum::incomplete_kloosterman_sq(query);
            out.row({{"q", kq},
                     {"a", ka},
                     {"N", kn},
                     {"real", v.real_part},
                     {"imag", v.imag_part},
                     {"abs", v.abs()},
                     {"term_count", v.term_count},
                     {"cancellation_ratio", v.cancellation_ratio}});
        } else if (cmd_exc->parsed()) {
            pellsum::factor::ExceptionalParams params;
            params.N = en;
            params.beta = ebeta;
            params.r = er;
            params.spacing = !eno_spacing;
            params.strict_spacing = estrict;
            auto E = pellsum::factor::exceptional_set(params);
            out.row({{"type", "summary"},
                     {"N", en},
                     {"beta", ebeta},
                     {"r", er},
                     {"spacing", params.spacing},
                     {"strict", params.strict_spacing},
                     {"size", E.size},
                     {"density", E.density()},
                     {"lemma_budget", E.lemma_budget()},
                     {"spacing_budget", E.spacing_budget()}});
            if (elist) {
                for (std::uint64_t n = 1; n <= en; ++n)
                    if (E.mask[n]) out.row({{"type", "member"}, {"n", n}});
            }
        } else if (cmd_part->parsed()) {
            pellsum::factor::ExceptionalParams params;
            params.N = pn;
            params.beta = pbeta;
            params.r = pr;
            params.spacing = true;
            auto rep = pellsum::factor::partition_sum_identity(params, pq, pa);
            out.row({{"N", pn},
                     {"beta", pbeta},
                     {"r", pr},
                     {"q", pq},
                     {"a", pa},
                     {"direct_real", rep.direct.real()},
                     {"direct_imag", rep.direct.imag()},
                     {"boxed_real", rep.boxed.real()},
                     {"boxed_imag", rep.boxed.imag()},
                     {"residual", rep.residual},
                     {"box_count", rep.box_count},
                     {"term_count", rep.term_count}});
        } else if (cmd_l2->parsed()) {
            if (lms.size() != lell)
                throw pellsum::RangeError("lemma2: need exactly ell values of --m");
            std::vector<std::vector<std::uint32_t>> sets;
            for (std::uint64_t M : lms) {
                std::vector<std::uint32_t> s;
                for (std::uint64_t p = M / 2 + 1; p <= M; ++p)
                    if (pellsum::is_prime_u64(p)) s.push_back(static_cast<std::uint32_t>(p));
                if (s.empty()) throw pellsum::RangeError("lemma2: no primes in (M/2, M]");
                sets.push_back(std::move(s));
            }
            auto inst = pellsum::amplify::lemma2_enumerate(lell, sets, common.budget);
            double bound = std::pow(2.0 * lell, static_cast<double>(lell));
            std::string m_desc, size_desc;
            for (std::size_t i = 0; i < lms.size(); ++i) {
                if (i) {
                    m_desc += ";";
                    size_desc += ";";
                }
                m_desc += std::to_string(lms[i]);
                size_desc += std::to_string(sets[i].size());
            }
            for (std::uint64_t M : lms) bound *= static_cast<double>(M) / std::log(static_cast<double>(M));
            out.row({{"ell", lell},
                     {"M", m_desc},
                     {"set_sizes", size_desc},
                     {"solutions", inst.solutions},
                     {"matched", inst.matched},
                     {"all_matched", inst.solutions == inst.matched},
                     {"collision_bound", bound},
                     {"below_bound", static_cast<double>(inst.solutions) < bound}});
        } else if (cmd_amp->parsed()) {
            auto plan = pellsum::amplify::make_plan(aq, arho, abeta, abetai);
            double logN = arho * std::log(static_cast<double>(aq));
            std::vector<pellsum::expsum::IntervalU64> intervals;
            for (double b : abetai) {
                double M = 0.5 * std::pow(static_cast<double>(aq), b);
                auto hi = static_cast<std::uint64_t>(M);
                auto lo = static_cast<std::uint64_t>(std::ceil(M * (1.0 - 1.0 / logN)));
                intervals.push_back({lo, hi});
            }
            auto rep = pellsum::amplify::holder_amplification_check(plan, aa, intervals, common.budget);
            for (std::size_t i = 0; i < rep.intervals.size(); ++i) {
                const auto& ir = rep.intervals[i];
                out.row({{"type", "interval"},
                         {"i", i},
                         {"lo", ir.interval.lo},
                         {"hi", ir.interval.hi},
                         {"prime_count", ir.prime_count},
                         {"ell", ir.ell},
                         {"l1", ir.l1},
                         {"l2_squared", ir.l2_squared},
                         {"linf", ir.linf},
                         {"l2_mass_ok", ir.l2_mass_ok},
                         {"linf_ok", ir.linf_ok},
                         {"window_margin", ir.window_margin},
                         {"count_proxy_ok", ir.count_proxy_ok}});
            }
            out.row({{"type", "summary"},
                     {"abs_S", rep.abs_S},
                     {"terms", rep.s_terms},
                     {"log_lhs", rep.log_lhs},
                     {"log_rhs", rep.log_rhs},
                     {"holder_ok", rep.holder_ok},
                     {"sum_z_real", rep.sum_z_real},
                     {"sum_z_imag", rep.sum_z_imag}});
        } else if (cmd_canc->parsed()) {
            auto rep = pellsum::amplify::proposition_cancellation(cq, crho, cbeta, cr, csamples,
                                                                  common.seed);
            out.row({{"type", "meta"},
                     {"seed", rep.seed},
                     {"q", rep.q},
                     {"rho", rep.rho},
                     {"N", rep.N},
                     {"beta", rep.beta},
                     {"r", rep.r},
                     {"exceptional_density", rep.exceptional_density}});
            for (const auto& s : rep.samples) out.row({{"type", "sample"}, {"a", s.a}, {"ratio", s.ratio}});
            out.row({{"type", "summary"},
                     {"max_ratio", rep.max_ratio},
                     {"median_ratio", rep.median_ratio},
                     {"exceptional_density", rep.exceptional_density}});
        } else if (cmd_coef->parsed()) {
            for (double alpha : coeff_alphas) {
                auto c = pellsum::fouvry::coefficient_table(alpha);
                out.row({{"alpha", c.alpha},
                         {"B", c.B_alpha},
                         {"lower_06", c.fouvry_lower_06},
                         {"lower_319", c.fouvry_lower_319},
                         {"discrepancy_06_vs_319", c.fouvry_lower_319 - c.fouvry_lower_06},
                         {"main_factor", c.main_factor},
                         {"delta_claim", c.delta_exponent_claim}});
            }
        } else if (cmd_reg->parsed()) {
            auto rp = pellsum::fouvry::range_parameters(rx, ralpha, ru);
            double term = pellsum::fouvry::admissible_main_term(rx, ralpha, common.budget);
            out.row({{"x", rx},
                     {"alpha", ralpha},
                     {"u", ru},
                     {"X_alpha", rp.X_alpha},
                     {"Y2", rp.Y2},
                     {"Y3", rp.Y3},
                     {"y2_approximate", rp.y2_approximate},
                     {"admissible_main_term", term}});
        } else if (cmd_probe->parsed()) {
            std::uint64_t hmax = thmax;
            if (hmax == 0) {
                if (tx == 0 || talpha <= 0.0)
                    throw pellsum::RangeError("probe-trilinear: give --hmax or both --x and --alpha");
                hmax = static_cast<std::uint64_t>(
                    std::pow(static_cast<double>(tx), talpha - 0.5 + teps));
                if (hmax < 1) hmax = 1;
            }
            auto rep = pellsum::fouvry::restricted_bound_probe({tu1min, tu1max}, {tu2min, tu2max},
                                                               tbeta, tr, hmax, common.budget);
            out.row({{"type", "meta"},
                     {"u1_lo", tu1min},
                     {"u1_hi", tu1max},
                     {"u2_lo", tu2min},
                     {"u2_hi", tu2max},
                     {"beta", tbeta},
                     {"r", tr},
                     {"h_max", hmax},
                     {"excluded_count", rep.excluded_count}});
            for (const auto& row : rep.rows) {
                out.row({{"type", "row"},
                         {"h", row.h},
                         {"u1", row.u1},
                         {"gcd_h_u1sq", row.gcd_h_u1sq},
                         {"admissible_count", row.admissible_count},
                         {"abs_inner", row.abs_inner},
                         {"ratio", row.ratio},
                         {"gcd_shape", row.gcd_shape}});
            }
        }
    } catch (const pellsum::BudgetExceededError& e) {
        std::cerr << "budget exceeded: " << e.what() << "\n";
        return 3;
    } catch (const pellsum::RangeError& e) {
        std::cerr << "precondition failed: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
