#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "pellsum/amplify.hpp"
#include "pellsum/expsum.hpp"
#include "pellsum/factor.hpp"
#include "pellsum/fouvry.hpp"
#include "pellsum/pell.hpp"

namespace py = pybind11;
using namespace pellsum;

namespace {

py::object mpz_to_pyint(const mpz_class& z) {
    // hex sidesteps CPython's digit limit on decimal int parsing
    return py::reinterpret_steal<py::object>(
        PyLong_FromString(z.get_str(16).c_str(), nullptr, 16));
}

expsum::IntSet to_int_set(const std::vector<std::uint64_t>& v) {
    return expsum::IntSet(v.begin(), v.end());
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Pell solution counting, squared-inverse Kloosterman sums, and the "
              "factorization machinery around them";

    py::register_exception<BudgetExceededError>(m, "BudgetExceeded", PyExc_RuntimeError);
    auto range_error = py::register_exception<RangeError>(m, "RangeError", PyExc_ValueError);
    py::register_exception<SquareInputError>(m, "SquareInput", range_error.ptr());
    py::register_exception<NotCoprimeError>(m, "NotCoprime", range_error.ptr());
    py::register_exception<NotPrimeError>(m, "NotPrime", range_error.ptr());
    py::register_exception<NotDivisorError>(m, "NotDivisor", range_error.ptr());

    // ---- pell ----
    py::class_<pell::PellSolution>(m, "PellSolution")
        .def_readonly("D", &pell::PellSolution::D)
        .def_property_readonly("t", [](const pell::PellSolution& s) { return mpz_to_pyint(s.t); })
        .def_property_readonly("u", [](const pell::PellSolution& s) { return mpz_to_pyint(s.u); })
        .def_readonly("eps_log", &pell::PellSolution::eps_log)
        .def("__repr__", [](const pell::PellSolution& s) {
            return "PellSolution(D=" + std::to_string(s.D) + ", t=" + s.t.get_str() +
                   ", u=" + s.u.get_str() + ")";
        });
    m.def("fundamental_solution", &pell::fundamental_solution, py::arg("D"),
          "Minimal (t, u) with t^2 - D u^2 = 1 for nonsquare D >= 2");

    py::class_<pell::SolutionCount>(m, "SolutionCount")
        .def_readonly("x", &pell::SolutionCount::x)
        .def_readonly("alpha", &pell::SolutionCount::alpha)
        .def_readonly("count_fundamental", &pell::SolutionCount::count_fundamental)
        .def_readonly("count_all_powers", &pell::SolutionCount::count_all_powers)
        .def_readonly("main_term", &pell::SolutionCount::main_term);
    m.def("count_solutions", &pell::count_solutions, py::arg("x"), py::arg("alpha"),
          "Counts of D <= x with eps_D (and its powers) below D^(1/2+alpha)");

    py::class_<pell::PowerIdentityReport>(m, "PowerIdentityReport")
        .def_readonly("x", &pell::PowerIdentityReport::x)
        .def_readonly("alpha", &pell::PowerIdentityReport::alpha)
        .def_readonly("S", &pell::PowerIdentityReport::S)
        .def_readonly("S_fundamental", &pell::PowerIdentityReport::S_fundamental)
        .def_readonly("S_shift_half", &pell::PowerIdentityReport::S_shift_half)
        .def_readonly("S_shift_quarter", &pell::PowerIdentityReport::S_shift_quarter)
        .def_readonly("residual_half", &pell::PowerIdentityReport::residual_half)
        .def_readonly("residual_quarter", &pell::PowerIdentityReport::residual_quarter);
    m.def("check_power_identity", &pell::check_power_identity, py::arg("x"), py::arg("alpha"));

    // ---- expsum ----
    py::class_<expsum::SumValue>(m, "SumValue")
        .def_readonly("real", &expsum::SumValue::real_part)
        .def_readonly("imag", &expsum::SumValue::imag_part)
        .def_readonly("term_count", &expsum::SumValue::term_count)
        .def_readonly("cancellation_ratio", &expsum::SumValue::cancellation_ratio)
        .def_property_readonly("value", &expsum::SumValue::value)
        .def("__abs__", &expsum::SumValue::abs);

    m.def("mod_inverse", &expsum::mod_inverse, py::arg("x"), py::arg("m"));
    m.def(
        "incomplete_kloosterman_sq",
        [](std::uint64_t q, std::int64_t a, std::uint64_t N,
           const std::vector<std::uint64_t>& excluded) {
            auto excl = to_int_set(excluded);
            expsum::KloostermanQuery query{q, a, N, excl.empty() ? nullptr : &excl};
            return expsum::incomplete_kloosterman_sq(query);
        },
        py::arg("q"), py::arg("a"), py::arg("N"),
        py::arg("excluded") = std::vector<std::uint64_t>{});
    m.def("complete_square_character_sum", &expsum::complete_square_character_sum,
          py::arg("q"), py::arg("a"));
    m.def(
        "multilinear_sq_sum",
        [](const std::vector<std::pair<std::uint64_t, std::uint64_t>>& intervals, std::uint64_t q,
           std::int64_t a, bool primes, std::optional<std::uint64_t> cofactor,
           std::uint64_t budget) {
            std::vector<expsum::IntervalU64> ivs;
            for (auto [lo, hi] : intervals) ivs.push_back({lo, hi});
            return expsum::multilinear_sq_sum(ivs, q, a, primes, cofactor, budget);
        },
        py::arg("intervals"), py::arg("q"), py::arg("a"), py::arg("primes") = true,
        py::arg("cofactor") = std::nullopt, py::arg("budget") = expsum::kDefaultBudget);

    py::class_<expsum::DensityMap>(m, "DensityMap")
        .def_readonly("modulus", &expsum::DensityMap::modulus)
        .def_readonly("ell", &expsum::DensityMap::ell)
        .def_readonly("prime_count", &expsum::DensityMap::prime_count)
        .def_readonly("l1", &expsum::DensityMap::l1)
        .def_readonly("l2_squared", &expsum::DensityMap::l2_squared)
        .def_readonly("linf", &expsum::DensityMap::linf)
        .def_property_readonly("counts", [](const expsum::DensityMap& dm) {
            py::dict d;
            for (const auto& [z, c] : dm.counts) d[py::int_(z)] = py::int_(c);
            return d;
        });
    m.def(
        "mu_density",
        [](std::pair<std::uint64_t, std::uint64_t> interval, std::uint32_t ell,
           std::uint64_t modulus, std::optional<std::pair<std::uint32_t, std::uint32_t>> split,
           std::uint64_t budget) {
            std::optional<expsum::SignsSplit> sp;
            if (split) sp = expsum::SignsSplit{split->first, split->second};
            return expsum::mu_density({interval.first, interval.second}, ell, modulus, sp, budget);
        },
        py::arg("interval"), py::arg("ell"), py::arg("modulus"), py::arg("split") = std::nullopt,
        py::arg("budget") = expsum::kDefaultBudget);
    m.def("subprogression_mass", &expsum::subprogression_mass, py::arg("density"), py::arg("q1"));
    py::class_<expsum::SubprogressionReport>(m, "SubprogressionReport")
        .def_readonly("q1", &expsum::SubprogressionReport::q1)
        .def_readonly("max_fiber_ratio", &expsum::SubprogressionReport::max_fiber_ratio)
        .def_readonly("threshold", &expsum::SubprogressionReport::threshold)
        .def_readonly("below_threshold", &expsum::SubprogressionReport::below_threshold);
    m.def("subprogression_report", &expsum::subprogression_report, py::arg("density"),
          py::arg("q1"));
    m.def(
        "trilinear_restricted_sum",
        [](std::uint64_t H, std::pair<std::uint64_t, std::uint64_t> u1_range,
           std::pair<std::uint64_t, std::uint64_t> u2_range,
           const std::vector<std::uint64_t>& excluded, const std::vector<double>& coeffs_h,
           const std::vector<double>& coeffs_u1, bool require_odd_u1, bool require_odd_u2,
           bool absolute_inner, std::uint64_t budget) {
            auto excl = to_int_set(excluded);
            expsum::TrilinearParams p;
            p.H = H;
            p.u1_range = {u1_range.first, u1_range.second};
            p.u2_range = {u2_range.first, u2_range.second};
            p.excluded = excl.empty() ? nullptr : &excl;
            p.coeffs_h = coeffs_h;
            p.coeffs_u1 = coeffs_u1;
            p.require_odd_u1 = require_odd_u1;
            p.require_odd_u2 = require_odd_u2;
            p.absolute_inner = absolute_inner;
            p.budget = budget;
            return expsum::trilinear_restricted_sum(p);
        },
        py::arg("H"), py::arg("u1_range"), py::arg("u2_range"),
        py::arg("excluded") = std::vector<std::uint64_t>{},
        py::arg("coeffs_h") = std::vector<double>{},
        py::arg("coeffs_u1") = std::vector<double>{}, py::arg("require_odd_u1") = false,
        py::arg("require_odd_u2") = false, py::arg("absolute_inner") = true,
        py::arg("budget") = expsum::kDefaultBudget);

    // ---- factor ----
    py::class_<factor::SpfTable>(m, "SpfTable")
        .def_static("build", &factor::SpfTable::build, py::arg("n_max"))
        .def_property_readonly("n_max", &factor::SpfTable::n_max)
        .def("spf", &factor::SpfTable::spf, py::arg("n"))
        .def("profile",
             [](const factor::SpfTable& t, std::uint64_t n) { return t.profile(n).primes_desc; },
             py::arg("n"), "Prime factors of n with multiplicity, largest first")
        .def("save", &factor::SpfTable::save, py::arg("path"))
        .def_static("load", &factor::SpfTable::load, py::arg("path"));
    m.def("sieve_profiles", &factor::sieve_profiles, py::arg("n_max"));
    m.def("psi_smooth_count",
          py::overload_cast<std::uint64_t, double>(&factor::psi_smooth_count), py::arg("N"),
          py::arg("y"));

    py::class_<factor::ExceptionalParams>(m, "ExceptionalParams")
        .def(py::init([](std::uint64_t N, double beta, std::uint32_t r, bool spacing,
                         bool strict_spacing) {
                 return factor::ExceptionalParams{N, beta, r, spacing, strict_spacing};
             }),
             py::arg("N"), py::arg("beta"), py::arg("r"), py::arg("spacing") = true,
             py::arg("strict_spacing") = false)
        .def_readwrite("N", &factor::ExceptionalParams::N)
        .def_readwrite("beta", &factor::ExceptionalParams::beta)
        .def_readwrite("r", &factor::ExceptionalParams::r)
        .def_readwrite("spacing", &factor::ExceptionalParams::spacing)
        .def_readwrite("strict_spacing", &factor::ExceptionalParams::strict_spacing);

    py::class_<factor::ExceptionalSet>(m, "ExceptionalSet")
        .def_readonly("size", &factor::ExceptionalSet::size)
        .def("density", &factor::ExceptionalSet::density)
        .def("lemma_budget", &factor::ExceptionalSet::lemma_budget)
        .def("spacing_budget", &factor::ExceptionalSet::spacing_budget)
        .def("__contains__", &factor::ExceptionalSet::contains)
        .def("members", [](const factor::ExceptionalSet& E) {
            std::vector<std::uint64_t> out;
            for (std::uint64_t n = 1; n < E.mask.size(); ++n)
                if (E.mask[n]) out.push_back(n);
            return out;
        });
    m.def("exceptional_set",
          py::overload_cast<const factor::ExceptionalParams&>(&factor::exceptional_set),
          py::arg("params"));

    py::class_<factor::Box>(m, "Box")
        .def_readonly("cells", &factor::Box::cells)
        .def_readonly("M", &factor::Box::M)
        .def_readonly("cofactor_bound", &factor::Box::cofactor_bound)
        .def_readonly("members", &factor::Box::members);
    py::class_<factor::BoxDecomposition>(m, "BoxDecomposition")
        .def_readonly("boxes", &factor::BoxDecomposition::boxes)
        .def_readonly("member_total", &factor::BoxDecomposition::member_total)
        .def_readonly("exceptional_size", &factor::BoxDecomposition::exceptional_size)
        .def_property_readonly("box_count",
                               [](const factor::BoxDecomposition& d) { return d.boxes.size(); });
    m.def("box_partition",
          py::overload_cast<const factor::ExceptionalParams&>(&factor::box_partition),
          py::arg("params"));

    py::class_<factor::PartitionIdentityReport>(m, "PartitionIdentityReport")
        .def_readonly("direct", &factor::PartitionIdentityReport::direct)
        .def_readonly("boxed", &factor::PartitionIdentityReport::boxed)
        .def_readonly("residual", &factor::PartitionIdentityReport::residual)
        .def_readonly("box_count", &factor::PartitionIdentityReport::box_count)
        .def_readonly("term_count", &factor::PartitionIdentityReport::term_count);
    m.def("partition_sum_identity",
          py::overload_cast<const factor::ExceptionalParams&, std::uint64_t, std::int64_t>(
              &factor::partition_sum_identity),
          py::arg("params"), py::arg("q"), py::arg("a"));

    // ---- amplify ----
    m.def("choose_ell", &amplify::choose_ell, py::arg("beta_i"));
    m.def("ell_window_holds", &amplify::ell_window_holds, py::arg("beta_i"), py::arg("ell"));
    py::class_<amplify::Lemma2Instance>(m, "Lemma2Instance")
        .def_readonly("ell", &amplify::Lemma2Instance::ell)
        .def_readonly("solutions", &amplify::Lemma2Instance::solutions)
        .def_readonly("matched", &amplify::Lemma2Instance::matched);
    m.def(
        "lemma2_enumerate",
        [](std::uint32_t ell, const std::vector<std::vector<std::uint32_t>>& sets,
           std::uint64_t budget) { return amplify::lemma2_enumerate(ell, sets, budget); },
        py::arg("ell"), py::arg("prime_sets"), py::arg("budget") = expsum::kDefaultBudget);

    py::class_<amplify::AmplificationPlan>(m, "AmplificationPlan")
        .def_readonly("q", &amplify::AmplificationPlan::q)
        .def_readonly("rho", &amplify::AmplificationPlan::rho)
        .def_readonly("beta", &amplify::AmplificationPlan::beta)
        .def_readonly("r", &amplify::AmplificationPlan::r)
        .def_readonly("beta_i", &amplify::AmplificationPlan::beta_i)
        .def_readonly("ell_i", &amplify::AmplificationPlan::ell_i);
    m.def(
        "make_plan",
        [](std::uint64_t q, double rho, double beta, const std::vector<double>& beta_i) {
            return amplify::make_plan(q, rho, beta, beta_i);
        },
        py::arg("q"), py::arg("rho"), py::arg("beta"), py::arg("beta_i"));

    py::class_<amplify::HolderIntervalReport>(m, "HolderIntervalReport")
        .def_readonly("prime_count", &amplify::HolderIntervalReport::prime_count)
        .def_readonly("ell", &amplify::HolderIntervalReport::ell)
        .def_readonly("l1", &amplify::HolderIntervalReport::l1)
        .def_readonly("l2_squared", &amplify::HolderIntervalReport::l2_squared)
        .def_readonly("linf", &amplify::HolderIntervalReport::linf)
        .def_readonly("l2_mass_ok", &amplify::HolderIntervalReport::l2_mass_ok)
        .def_readonly("linf_ok", &amplify::HolderIntervalReport::linf_ok)
        .def_readonly("window_margin", &amplify::HolderIntervalReport::window_margin)
        .def_readonly("count_proxy_ok", &amplify::HolderIntervalReport::count_proxy_ok);
    py::class_<amplify::HolderReport>(m, "HolderReport")
        .def_readonly("abs_S", &amplify::HolderReport::abs_S)
        .def_readonly("s_terms", &amplify::HolderReport::s_terms)
        .def_readonly("log_lhs", &amplify::HolderReport::log_lhs)
        .def_readonly("log_rhs", &amplify::HolderReport::log_rhs)
        .def_readonly("holder_ok", &amplify::HolderReport::holder_ok)
        .def_readonly("sum_z_real", &amplify::HolderReport::sum_z_real)
        .def_readonly("sum_z_imag", &amplify::HolderReport::sum_z_imag)
        .def_readonly("intervals", &amplify::HolderReport::intervals);
    m.def(
        "holder_amplification_check",
        [](const amplify::AmplificationPlan& plan, std::int64_t a,
           const std::vector<std::pair<std::uint64_t, std::uint64_t>>& intervals,
           std::uint64_t budget) {
            std::vector<expsum::IntervalU64> ivs;
            for (auto [lo, hi] : intervals) ivs.push_back({lo, hi});
            return amplify::holder_amplification_check(plan, a, ivs, budget);
        },
        py::arg("plan"), py::arg("a"), py::arg("intervals"),
        py::arg("budget") = expsum::kDefaultBudget);

    py::class_<amplify::CancellationSample>(m, "CancellationSample")
        .def_readonly("a", &amplify::CancellationSample::a)
        .def_readonly("ratio", &amplify::CancellationSample::ratio);
    py::class_<amplify::CancellationReport>(m, "CancellationReport")
        .def_readonly("q", &amplify::CancellationReport::q)
        .def_readonly("rho", &amplify::CancellationReport::rho)
        .def_readonly("N", &amplify::CancellationReport::N)
        .def_readonly("seed", &amplify::CancellationReport::seed)
        .def_readonly("exceptional_density", &amplify::CancellationReport::exceptional_density)
        .def_readonly("samples", &amplify::CancellationReport::samples)
        .def_readonly("max_ratio", &amplify::CancellationReport::max_ratio)
        .def_readonly("median_ratio", &amplify::CancellationReport::median_ratio);
    m.def("proposition_cancellation", &amplify::proposition_cancellation, py::arg("q"),
          py::arg("rho"), py::arg("beta"), py::arg("r"), py::arg("samples"),
          py::arg("seed") = 0x5EED5EED5EEDULL);

    // ---- fouvry ----
    py::class_<fouvry::HooleyCoefficients>(m, "HooleyCoefficients")
        .def_readonly("alpha", &fouvry::HooleyCoefficients::alpha)
        .def_readonly("B_alpha", &fouvry::HooleyCoefficients::B_alpha)
        .def_readonly("fouvry_lower_06", &fouvry::HooleyCoefficients::fouvry_lower_06)
        .def_readonly("fouvry_lower_319", &fouvry::HooleyCoefficients::fouvry_lower_319)
        .def_readonly("main_factor", &fouvry::HooleyCoefficients::main_factor)
        .def_readonly("delta_exponent_claim", &fouvry::HooleyCoefficients::delta_exponent_claim);
    m.def("coefficient_table", &fouvry::coefficient_table, py::arg("alpha"));

    py::enum_<fouvry::ResidueMode>(m, "ResidueMode")
        .value("Auto", fouvry::ResidueMode::Auto)
        .value("Scan", fouvry::ResidueMode::Scan)
        .value("Crt", fouvry::ResidueMode::Crt);
    m.def("sqrt_one_residues", &fouvry::sqrt_one_residues, py::arg("u"),
          py::arg("mode") = fouvry::ResidueMode::Auto,
          py::arg("budget") = expsum::kDefaultBudget);
    m.def("phi_pair", &fouvry::phi_pair, py::arg("u1"), py::arg("u2"));
    m.def(
        "range_parameters",
        [](std::uint64_t x, double alpha, std::uint64_t u) {
            auto rp = fouvry::range_parameters(x, alpha, u);
            return py::make_tuple(rp.X_alpha, rp.Y2, rp.Y3);
        },
        py::arg("x"), py::arg("alpha"), py::arg("u"));
    m.def("admissible_main_term", &fouvry::admissible_main_term, py::arg("x"), py::arg("alpha"),
          py::arg("budget") = expsum::kDefaultBudget);

    py::class_<fouvry::ExcludedDeficitReport>(m, "ExcludedDeficitReport")
        .def_readonly("deficit", &fouvry::ExcludedDeficitReport::deficit)
        .def_readonly("u1_harmonic", &fouvry::ExcludedDeficitReport::u1_harmonic)
        .def_readonly("exceptional_harmonic", &fouvry::ExcludedDeficitReport::exceptional_harmonic)
        .def_readonly("u2_grid", &fouvry::ExcludedDeficitReport::u2_grid)
        .def_readonly("fitted_C", &fouvry::ExcludedDeficitReport::fitted_C)
        .def_readonly("ratio_at_fit", &fouvry::ExcludedDeficitReport::ratio_at_fit);
    m.def("excluded_deficit", &fouvry::excluded_deficit, py::arg("x"), py::arg("alpha"),
          py::arg("beta"), py::arg("r"), py::arg("budget") = expsum::kDefaultBudget);

    py::class_<fouvry::TrilinearProbeRow>(m, "TrilinearProbeRow")
        .def_readonly("h", &fouvry::TrilinearProbeRow::h)
        .def_readonly("u1", &fouvry::TrilinearProbeRow::u1)
        .def_readonly("gcd_h_u1sq", &fouvry::TrilinearProbeRow::gcd_h_u1sq)
        .def_readonly("admissible_count", &fouvry::TrilinearProbeRow::admissible_count)
        .def_readonly("abs_inner", &fouvry::TrilinearProbeRow::abs_inner)
        .def_readonly("ratio", &fouvry::TrilinearProbeRow::ratio)
        .def_readonly("gcd_shape", &fouvry::TrilinearProbeRow::gcd_shape);
    py::class_<fouvry::TrilinearProbeReport>(m, "TrilinearProbeReport")
        .def_readonly("excluded_count", &fouvry::TrilinearProbeReport::excluded_count)
        .def_readonly("rows", &fouvry::TrilinearProbeReport::rows);
    m.def(
        "restricted_bound_probe",
        [](std::pair<std::uint64_t, std::uint64_t> u1_range,
           std::pair<std::uint64_t, std::uint64_t> u2_range, double beta, std::uint32_t r,
           std::uint64_t h_max, std::uint64_t budget) {
            return fouvry::restricted_bound_probe({u1_range.first, u1_range.second},
                                                  {u2_range.first, u2_range.second}, beta, r,
                                                  h_max, budget);
        },
        py::arg("u1_range"), py::arg("u2_range"), py::arg("beta"), py::arg("r"),
        py::arg("h_max"), py::arg("budget") = expsum::kDefaultBudget);

    m.attr("__all__") = py::make_tuple(
        "PellSolution", "fundamental_solution", "SolutionCount", "count_solutions",
        "PowerIdentityReport", "check_power_identity", "SumValue", "mod_inverse",
        "incomplete_kloosterman_sq", "complete_square_character_sum", "multilinear_sq_sum",
        "DensityMap", "mu_density", "subprogression_mass", "SubprogressionReport",
        "subprogression_report", "trilinear_restricted_sum",
        "SpfTable", "sieve_profiles", "psi_smooth_count", "ExceptionalParams", "ExceptionalSet",
        "exceptional_set", "Box", "BoxDecomposition", "box_partition",
        "PartitionIdentityReport", "partition_sum_identity", "choose_ell", "ell_window_holds",
        "Lemma2Instance", "lemma2_enumerate", "AmplificationPlan", "make_plan",
        "HolderIntervalReport", "HolderReport", "holder_amplification_check",
        "CancellationSample", "CancellationReport", "proposition_cancellation",
        "HooleyCoefficients", "coefficient_table", "ResidueMode", "sqrt_one_residues",
        "phi_pair", "range_parameters", "admissible_main_term", "ExcludedDeficitReport",
        "excluded_deficit", "TrilinearProbeRow", "TrilinearProbeReport",
        "restricted_bound_probe", "RangeError", "SquareInput", "NotCoprime", "NotPrime",
        "NotDivisor", "BudgetExceeded");
}
