#include "pellsum/factor.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>

#include "pellsum/numeric.hpp"

namespace pellsum::factor {

SpfTable SpfTable::build(std::uint64_t n_max) {
    if (n_max < 1) throw RangeError("SpfTable: N must be >= 1");
    if (n_max > kSieveBudget) throw BudgetExceededError("SpfTable: N exceeds the sieve budget");
    SpfTable t;
    t.n_max_ = n_max;
    t.spf_.assign(n_max + 1, 0);
    if (n_max >= 1) t.spf_[1] = 1;
    for (std::uint64_t i = 2; i <= n_max; ++i) {
        if (t.spf_[i] == 0) {
            t.spf_[i] = static_cast<std::uint32_t>(i);
            if (i * i <= n_max) {
                for (std::uint64_t j = i * i; j <= n_max; j += i) {
                    if (t.spf_[j] == 0) t.spf_[j] = static_cast<std::uint32_t>(i);
                }
            }
        }
    }
    return t;
}

std::uint32_t SpfTable::spf(std::uint64_t n) const {
    if (n < 1 || n > n_max_) throw RangeError("SpfTable::spf: n out of range");
    return spf_[n];
}

void SpfTable::factor_desc(std::uint64_t n, std::vector<std::uint32_t>& out) const {
    if (n < 1 || n > n_max_) throw RangeError("SpfTable: n out of range");
    out.clear();
    while (n > 1) {
        std::uint32_t p = spf_[n];
        out.push_back(p);
        n /= p;
    }
    std::reverse(out.begin(), out.end()); // spf chain is ascending
}

FactorProfile SpfTable::profile(std::uint64_t n) const {
    FactorProfile fp;
    fp.n = n;
    factor_desc(n, fp.primes_desc);
    return fp;
}

void SpfTable::save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("SpfTable::save: cannot open " + path);
    out.write("SPF1", 4);
    std::uint64_t n = n_max_;
    std::array<unsigned char, 8> hdr{};
    for (int i = 0; i < 8; ++i) hdr[i] = static_cast<unsigned char>((n >> (8 * i)) & 0xFF);
    out.write(reinterpret_cast<const char*>(hdr.data()), 8);
    for (std::uint32_t v : spf_) {
        std::array<unsigned char, 4> e{};
        for (int i = 0; i < 4; ++i) e[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xFF);
        out.write(reinterpret_cast<const char*>(e.data()), 4);
    }
    if (!out) throw std::runtime_error("SpfTable::save: write failed for " + path);
}

SpfTable SpfTable::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("SpfTable::load: cannot open " + path);
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, "SPF1", 4) != 0)
        throw std::runtime_error("SpfTable::load: bad magic in " + path);
    std::array<unsigned char, 8> hdr{};
    in.read(reinterpret_cast<char*>(hdr.data()), 8);
    if (!in) throw std::runtime_error("SpfTable::load: truncated header in " + path);
    std::uint64_t n = 0;
    for (int i = 0; i < 8; ++i) n |= static_cast<std::uint64_t>(hdr[i]) << (8 * i);
    if (n < 1 || n > kSieveBudget) throw std::runtime_error("SpfTable::load: implausible N in " + path);
    SpfTable t;
    t.n_max_ = n;
    t.spf_.assign(n + 1, 0);
    for (std::uint64_t i = 0; i <= n; ++i) {
        std::array<unsigned char, 4> e{};
        in.read(reinterpret_cast<char*>(e.data()), 4);
        if (!in) throw std::runtime_error("SpfTable::load: truncated data in " + path);
        std::uint32_t v = 0;
        for (int k = 0; k < 4; ++k) v |= static_cast<std::uint32_t>(e[k]) << (8 * k);
        t.spf_[i] = v;
    }
    return t;
}

SpfTable SpfTable::load_or_build_cached(const std::string& cache_dir, std::uint64_t n_max) {
    namespace fs = std::filesystem;
    fs::path path = fs::path(cache_dir) / ("spf_" + std::to_string(n_max) + ".bin");
    if (fs::exists(path)) {
        SpfTable t = load(path.string());
        if (t.n_max() == n_max) return t;
    }
    SpfTable t = build(n_max);
    fs::create_directories(cache_dir);
    t.save(path.string());
    return t;
}

std::uint64_t psi_smooth_count(const SpfTable& table, std::uint64_t N, double y) {
    if (N < 1 || N > table.n_max()) throw RangeError("psi_smooth_count: N out of table range");
    std::uint64_t count = 1; // n = 1
    for (std::uint64_t n = 2; n <= N; ++n) {
        std::uint64_t m = n;
        std::uint32_t largest = 1;
        while (m > 1) {
            largest = table.spf(m);
            m /= largest;
        }
        if (static_cast<double>(largest) <= y) ++count;
    }
    return count;
}

std::uint64_t psi_smooth_count(std::uint64_t N, double y) {
    if (N < 1) throw RangeError("psi_smooth_count: N must be >= 1");
    return psi_smooth_count(SpfTable::build(N), N, y);
}

double ExceptionalSet::lemma_budget() const {
    return params.beta * std::pow(std::log(1.0 / params.beta), static_cast<double>(params.r));
}

double ExceptionalSet::spacing_budget() const {
    double ln = std::log(static_cast<double>(params.N));
    return std::log(ln) / ln;
}

namespace {

void check_exceptional_params(const ExceptionalParams& p) {
    if (p.N < 2) throw RangeError("exceptional_set: N must be >= 2");
    if (!(p.beta > 0.0) || p.beta >= 1.0) throw RangeError("exceptional_set: beta must be in (0, 1)");
    if (p.r < 1) throw RangeError("exceptional_set: r must be >= 1");
}

} // namespace

ExceptionalSet exceptional_set(const ExceptionalParams& params, const SpfTable& table) {
    check_exceptional_params(params);
    if (params.N > table.n_max()) throw RangeError("exceptional_set: table smaller than N");

    ExceptionalSet E;
    E.params = params;
    E.mask.assign(params.N + 1, 0);

    const double threshold = std::pow(static_cast<double>(params.N), params.beta);
    const double gap = 1.0 + 10.0 / std::log(static_cast<double>(params.N));
    const std::uint32_t r = params.r;

    E.mask[1] = 1; // no prime factors
    std::uint64_t size = 1;
    std::vector<std::uint32_t> fs;
    for (std::uint64_t n = 2; n <= params.N; ++n) {
        table.factor_desc(n, fs);
        bool exceptional = false;
        if (fs.size() < r) {
            exceptional = true;
        } else if (static_cast<double>(fs[r - 1]) <= threshold) {
            exceptional = true;
        } else if (params.spacing) {
            for (std::uint32_t i = 0; i + 1 < r; ++i) {
                if (static_cast<double>(fs[i]) <= gap * static_cast<double>(fs[i + 1])) {
                    exceptional = true;
                    break;
                }
            }
            if (!exceptional && params.strict_spacing && fs.size() > r) {
                if (static_cast<double>(fs[r - 1]) <= gap * static_cast<double>(fs[r]))
                    exceptional = true;
            }
        }
        if (exceptional) {
            E.mask[n] = 1;
            ++size;
        }
    }
    E.size = size;
    return E;
}

ExceptionalSet exceptional_set(const ExceptionalParams& params) {
    check_exceptional_params(params);
    return exceptional_set(params, SpfTable::build(params.N));
}

namespace {

// Geometric grid M_k = N (1 - 1/log N)^k; cell(p) is the k with
// M_{k+1} < p <= M_k, located by logs and corrected at the boundaries.
struct BoxGrid {
    double N;
    double delta;
    double log_ratio; // log(1 - delta)

    explicit BoxGrid(std::uint64_t n)
        : N(static_cast<double>(n)),
          delta(1.0 / std::log(static_cast<double>(n))),
          log_ratio(std::log1p(-1.0 / std::log(static_cast<double>(n)))) {}

    double endpoint(std::uint32_t k) const { return N * std::pow(1.0 - delta, static_cast<double>(k)); }

    std::uint32_t cell(std::uint64_t p) const {
        double lp = static_cast<double>(p);
        auto k = static_cast<std::int64_t>(std::log(lp / N) / log_ratio);
        if (k < 0) k = 0;
        while (endpoint(static_cast<std::uint32_t>(k)) < lp && k > 0) --k;
        while (endpoint(static_cast<std::uint32_t>(k + 1)) >= lp) ++k;
        return static_cast<std::uint32_t>(k);
    }
};

} // namespace

BoxDecomposition box_partition(const ExceptionalParams& params, const SpfTable& table) {
    if (!params.spacing)
        throw RangeError("box_partition: requires the spacing condition (set params.spacing)");
    ExceptionalSet E = exceptional_set(params, table);

    BoxGrid grid(params.N);
    std::map<std::vector<std::uint32_t>, std::vector<std::uint64_t>> cells;
    std::vector<std::uint32_t> fs;
    std::vector<std::uint32_t> key(params.r);
    for (std::uint64_t n = 2; n <= params.N; ++n) {
        if (E.mask[n]) continue;
        table.factor_desc(n, fs);
        for (std::uint32_t i = 0; i < params.r; ++i) key[i] = grid.cell(fs[i]);
        cells[key].push_back(n);
    }

    BoxDecomposition deco;
    deco.params = params;
    deco.exceptional_size = E.size;
    for (auto& [k, members] : cells) {
        Box box;
        box.cells = k;
        box.M.reserve(k.size());
        double prod = 1.0;
        for (std::uint32_t c : k) {
            double m = grid.endpoint(c);
            box.M.push_back(m);
            prod *= m;
        }
        box.cofactor_bound = 2.0 * static_cast<double>(params.N) / prod;
        deco.member_total += members.size();
        box.members = std::move(members);
        deco.boxes.push_back(std::move(box));
    }
    return deco;
}

BoxDecomposition box_partition(const ExceptionalParams& params) {
    check_exceptional_params(params);
    return box_partition(params, SpfTable::build(params.N));
}

PartitionIdentityReport partition_sum_identity(const ExceptionalParams& params, std::uint64_t q,
                                               std::int64_t a, const SpfTable& table) {
    if (q < 1) throw RangeError("partition_sum_identity: q must be positive");
    {
        std::int64_t ar = a % static_cast<std::int64_t>(q);
        if (ar < 0) ar += static_cast<std::int64_t>(q);
        if (std::gcd(static_cast<std::uint64_t>(ar), q) != 1)
            throw NotCoprimeError("partition_sum_identity: gcd(a, q) > 1");
    }
    BoxDecomposition deco = box_partition(params, table);
    ExceptionalSet E = exceptional_set(params, table);
    std::uint64_t ar = [&] {
        std::int64_t v = a % static_cast<std::int64_t>(q);
        if (v < 0) v += static_cast<std::int64_t>(q);
        return static_cast<std::uint64_t>(v);
    }();

    PartitionIdentityReport rep;
    rep.box_count = deco.boxes.size();

    ComplexAccumulator direct;
    std::uint64_t terms = 0;
    for (std::uint64_t x = 1; x <= params.N; ++x) {
        if (E.mask[x]) continue;
        if (std::gcd(x, q) != 1) continue;
        std::uint64_t inv = mod_inverse_u64(static_cast<std::int64_t>(x % q), q);
        direct.add(unit_phase(mulmod_u64(ar, mulmod_u64(inv, inv, q), q), q));
        ++terms;
    }
    rep.direct = direct.value();
    rep.term_count = terms;

    // box side: each member contributes through the inverses of its top-r
    // primes and cofactor; the products agree with xbar^2 mod q exactly.
    ComplexAccumulator boxed;
    std::vector<std::uint32_t> fs;
    for (const Box& box : deco.boxes) {
        for (std::uint64_t n : box.members) {
            if (std::gcd(n, q) != 1) continue;
            table.factor_desc(n, fs);
            std::uint64_t cofactor = n;
            std::uint64_t k = ar;
            for (std::uint32_t i = 0; i < params.r; ++i) {
                cofactor /= fs[i];
                std::uint64_t inv = mod_inverse_u64(static_cast<std::int64_t>(fs[i] % q), q);
                k = mulmod_u64(k, mulmod_u64(inv, inv, q), q);
            }
            std::uint64_t ci = mod_inverse_u64(static_cast<std::int64_t>(cofactor % q), q);
            k = mulmod_u64(k, mulmod_u64(ci, ci, q), q);
            boxed.add(unit_phase(k, q));
        }
    }
    rep.boxed = boxed.value();
    rep.residual = std::abs(rep.direct - rep.boxed);
    return rep;
}

PartitionIdentityReport partition_sum_identity(const ExceptionalParams& params, std::uint64_t q,
                                               std::int64_t a) {
    check_exceptional_params(params);
    return partition_sum_identity(params, q, a, SpfTable::build(params.N));
}

} // namespace pellsum::factor
