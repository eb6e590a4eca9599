#include "qotsim/ldpc.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_set>

#include "qotsim/rng.hpp"
#include "qotsim/xof.hpp"

namespace qotsim {

namespace {
constexpr size_t kColumnWeight = 3;
constexpr int kBpIterations = 50;
constexpr size_t kExhaustiveMaxN = 24;
} // namespace

LinearCode build_code(size_t n, size_t q, const std::array<uint8_t, 32>& seed,
                      double design_error_rate) {
    if (q < 1 || q >= n) throw std::invalid_argument("build_code: need 1 <= q < n");
    LinearCode code;
    code.n = n;
    code.q = q;
    code.seed = seed;
    code.design_error_rate = design_error_rate;
    code.row_cols.assign(q, {});
    code.col_rows.assign(n, {});

    Rng rng(std::span<const uint8_t>(seed.data(), seed.size()));
    const size_t wc = std::min(kColumnWeight, q);
    std::vector<uint32_t> load(q, 0);
    std::unordered_set<uint64_t> used_pairs;
    used_pairs.reserve(n * 4);
    auto pair_key = [q](uint32_t a, uint32_t b) {
        if (a > b) std::swap(a, b);
        return uint64_t(a) * q + b;
    };

    std::vector<uint32_t> order(q);
    for (uint32_t r = 0; r < q; ++r) order[r] = r;
    std::vector<uint64_t> tiebreak(q);

    for (size_t col = 0; col < n; ++col) {
        for (uint32_t r = 0; r < q; ++r) tiebreak[r] = rng.next_u64();
        std::sort(order.begin(), order.end(), [&](uint32_t a, uint32_t b) {
            if (load[a] != load[b]) return load[a] < load[b];
            return tiebreak[a] < tiebreak[b];
        });
        std::vector<uint32_t> rows;
        // first pass: honor the no-shared-pair constraint
        for (uint32_t r : order) {
            if (rows.size() == wc) break;
            bool clash = false;
            for (uint32_t s : rows)
                if (used_pairs.count(pair_key(r, s))) { clash = true; break; }
            if (!clash) rows.push_back(r);
        }
        // fallback: allow pair reuse when the greedy pass runs dry
        for (uint32_t r : order) {
            if (rows.size() == wc) break;
            if (std::find(rows.begin(), rows.end(), r) == rows.end()) rows.push_back(r);
        }
        for (size_t i = 0; i < rows.size(); ++i)
            for (size_t j = i + 1; j < rows.size(); ++j)
                used_pairs.insert(pair_key(rows[i], rows[j]));
        for (uint32_t r : rows) {
            code.row_cols[r].push_back(uint32_t(col));
            code.col_rows[col].push_back(r);
            ++load[r];
        }
    }
    return code;
}

BitVec syndrome(const LinearCode& code, const BitVec& x) {
    if (x.size() != code.n) throw std::invalid_argument("syndrome: |x| != n");
    BitVec s(code.q);
    for (size_t r = 0; r < code.q; ++r) {
        unsigned acc = 0;
        for (uint32_t c : code.row_cols[r]) acc ^= unsigned(x.get(c));
        if (acc) s.set(r, true);
    }
    return s;
}

namespace {

// Exhaustive minimum-weight search over error patterns, n <= 24.  Column
// syndromes fit in a 32-bit word.
std::optional<BitVec> decode_exhaustive(const LinearCode& code, const BitVec& y,
                                        const BitVec& diff, size_t max_flips) {
    const size_t n = code.n;
    std::vector<uint32_t> colsyn(n, 0);
    for (size_t c = 0; c < n; ++c)
        for (uint32_t r : code.col_rows[c]) colsyn[c] |= uint32_t(1) << r;
    uint32_t target = 0;
    for (size_t r = 0; r < code.q; ++r)
        if (diff.get(r)) target |= uint32_t(1) << r;

    if (target == 0) return y;

    std::vector<size_t> pick;
    // depth-limited DFS by weight, lowest weight found first
    for (size_t w = 1; w <= std::min(max_flips, n); ++w) {
        pick.assign(w, 0);
        std::vector<size_t> idx(w);
        // iterative combination enumeration
        for (size_t i = 0; i < w; ++i) idx[i] = i;
        while (true) {
            uint32_t acc = 0;
            for (size_t i = 0; i < w; ++i) acc ^= colsyn[idx[i]];
            if (acc == target) {
                BitVec out = y;
                for (size_t i = 0; i < w; ++i) out.flip(idx[i]);
                return out;
            }
            // next combination
            size_t i = w;
            while (i > 0) {
                --i;
                if (idx[i] != i + n - w) {
                    ++idx[i];
                    for (size_t j = i + 1; j < w; ++j) idx[j] = idx[j - 1] + 1;
                    break;
                }
                if (i == 0) { i = SIZE_MAX; break; }
            }
            if (i == SIZE_MAX) break;
        }
    }
    return std::nullopt;
}

std::optional<BitVec> decode_bp(const LinearCode& code, const BitVec& y,
                                const BitVec& diff, size_t max_flips) {
    const size_t n = code.n, q = code.q;
    double p = std::clamp(code.design_error_rate, 1e-6, 0.4999);
    const double llr0 = std::log((1.0 - p) / p);

    // edge storage
    std::vector<size_t> row_off(q + 1, 0);
    for (size_t r = 0; r < q; ++r) row_off[r + 1] = row_off[r] + code.row_cols[r].size();
    const size_t n_edges = row_off[q];
    std::vector<uint32_t> edge_col(n_edges);
    std::vector<double> msg_cv(n_edges, 0.0);  // check -> var
    std::vector<double> msg_vc(n_edges);       // var -> check
    std::vector<std::vector<size_t>> col_edges(n);
    for (size_t r = 0; r < q; ++r)
        for (size_t i = 0; i < code.row_cols[r].size(); ++i) {
            size_t e = row_off[r] + i;
            edge_col[e] = code.row_cols[r][i];
            col_edges[edge_col[e]].push_back(e);
        }
    for (size_t e = 0; e < n_edges; ++e) msg_vc[e] = llr0;

    BitVec err(n);
    std::vector<double> posterior(n);
    for (int iter = 0; iter < kBpIterations; ++iter) {
        // check update
        for (size_t r = 0; r < q; ++r) {
            const double sign0 = diff.get(r) ? -1.0 : 1.0;
            size_t b = row_off[r], e = row_off[r + 1];
            double prod = sign0;
            double min1 = 1e300, min2 = 1e300;
            size_t argmin = b;
            for (size_t k = b; k < e; ++k) {
                double v = msg_vc[k];
                double a = std::fabs(v);
                if (v < 0) prod = -prod;
                if (a < min1) { min2 = min1; min1 = a; argmin = k; }
                else if (a < min2) min2 = a;
            }
            for (size_t k = b; k < e; ++k) {
                double a = (k == argmin) ? min2 : min1;
                double s = prod * (msg_vc[k] < 0 ? -1.0 : 1.0);
                msg_cv[k] = 0.8 * s * a;   // normalized min-sum
            }
        }
        // variable update + decision
        for (size_t c = 0; c < n; ++c) {
            double total = llr0;
            for (size_t e : col_edges[c]) total += msg_cv[e];
            posterior[c] = total;
            for (size_t e : col_edges[c]) msg_vc[e] = total - msg_cv[e];
            err.set(c, total < 0);
        }
        if (syndrome(code, err) == diff) {
            if (err.popcount() > max_flips) return std::nullopt;
            return y ^ err;
        }
    }
    return std::nullopt;
}

} // namespace

std::optional<BitVec> decode(const LinearCode& code, const BitVec& y,
                             const BitVec& target_syndrome, size_t max_flips) {
    if (y.size() != code.n) throw std::invalid_argument("decode: |y| != n");
    if (target_syndrome.size() != code.q)
        throw std::invalid_argument("decode: |syndrome| != q");
    BitVec diff = syndrome(code, y) ^ target_syndrome;
    if (diff.popcount() == 0) return y;
    if (code.n <= kExhaustiveMaxN)
        return decode_exhaustive(code, y, diff, max_flips);
    return decode_bp(code, y, diff, max_flips);
}

std::array<uint8_t, 32> code_seed_from_label(std::string_view label) {
    auto bytes = shake256(std::span<const uint8_t>(
                              reinterpret_cast<const uint8_t*>(label.data()), label.size()),
                          32);
    std::array<uint8_t, 32> out{};
    std::copy(bytes.begin(), bytes.end(), out.begin());
    return out;
}

} // namespace qotsim
