#include "loopdec/code.hpp"

#include <algorithm>
#include <deque>
#include <set>
#include <sstream>
#include <fstream>
#include <stdexcept>

namespace loopdec {

ParityCheckCode::ParityCheckCode(int n_bits, std::vector<std::vector<int>> check_neighbors)
    : n_bits_(n_bits), check_neighbors_(std::move(check_neighbors)) {
    if (n_bits_ <= 0) throw std::invalid_argument("code must have at least one bit");
    bit_neighbors_.assign(n_bits_, {});
    bit_edges_.assign(n_bits_, {});
    n_edges_ = 0;
    check_edge_begin_.reserve(check_neighbors_.size() + 1);
    for (size_t a = 0; a < check_neighbors_.size(); ++a) {
        const auto& nb = check_neighbors_[a];
        if (nb.empty()) throw std::invalid_argument("empty check " + std::to_string(a));
        std::set<int> seen;
        check_edge_begin_.push_back(n_edges_);
        for (int i : nb) {
            if (i < 0 || i >= n_bits_)
                throw std::invalid_argument("check " + std::to_string(a) +
                                            " references bit " + std::to_string(i));
            if (!seen.insert(i).second)
                throw std::invalid_argument("repeated bit " + std::to_string(i) +
                                            " in check " + std::to_string(a));
            bit_neighbors_[i].push_back(static_cast<int>(a));
            bit_edges_[i].push_back(n_edges_);
            edge_bit_.push_back(i);
            edge_check_.push_back(static_cast<int>(a));
            ++n_edges_;
        }
    }
    check_edge_begin_.push_back(n_edges_);
    for (int i = 0; i < n_bits_; ++i)
        if (bit_neighbors_[i].empty())
            throw std::invalid_argument("bit " + std::to_string(i) + " is in no check");
}

int ParityCheckCode::edge_id(int i, int a) const {
    const auto& nb = check_neighbors_[a];
    for (size_t k = 0; k < nb.size(); ++k)
        if (nb[k] == i) return check_edge_begin_[a] + static_cast<int>(k);
    throw std::invalid_argument("no edge between bit " + std::to_string(i) +
                                " and check " + std::to_string(a));
}

int ParityCheckCode::max_bit_degree() const {
    int d = 0;
    for (const auto& v : bit_neighbors_) d = std::max<int>(d, v.size());
    return d;
}

int ParityCheckCode::max_check_degree() const {
    int d = 0;
    for (const auto& v : check_neighbors_) d = std::max<int>(d, v.size());
    return d;
}

namespace {

struct AlistTokens {
    std::vector<long> values;
    std::vector<int> lines;  // source line per token, for error reports

    long take(size_t& pos, const char* what) {
        if (pos >= values.size())
            throw std::runtime_error(std::string("alist: unexpected end of input reading ") + what);
        return values[pos++];
    }
    int line(size_t pos) const {
        return pos < lines.size() ? lines[pos] : (lines.empty() ? 1 : lines.back());
    }
};

AlistTokens tokenize_alist(const std::string& text) {
    AlistTokens t;
    int line = 1;
    std::string cur;
    auto flush = [&]() {
        if (cur.empty()) return;
        try {
            t.values.push_back(std::stol(cur));
        } catch (const std::exception&) {
            throw std::runtime_error("alist: bad token '" + cur + "' at line " +
                                     std::to_string(line));
        }
        t.lines.push_back(line);
        cur.clear();
    };
    for (char c : text) {
        if (c == '\n') {
            flush();
            ++line;
        } else if (c == ' ' || c == '\t' || c == '\r') {
            flush();
        } else {
            cur.push_back(c);
        }
    }
    flush();
    return t;
}

}  // namespace

ParityCheckCode parse_alist(const std::string& text) {
    AlistTokens tok = tokenize_alist(text);
    size_t pos = 0;
    auto fail = [&](const std::string& msg, size_t at) {
        throw std::runtime_error("alist: " + msg + " (line " + std::to_string(tok.line(at)) + ")");
    };

    long n = tok.take(pos, "n");
    long m = tok.take(pos, "m");
    if (n <= 0 || m <= 0) fail("header must give positive n and m", 0);
    long max_col = tok.take(pos, "max column degree");
    long max_row = tok.take(pos, "max row degree");
    if (max_col <= 0 || max_row <= 0) fail("max degrees must be positive", pos - 1);

    std::vector<long> col_deg(n), row_deg(m);
    for (long i = 0; i < n; ++i) {
        col_deg[i] = tok.take(pos, "column degree");
        if (col_deg[i] < 0 || col_deg[i] > max_col)
            fail("column degree out of range for bit " + std::to_string(i + 1), pos - 1);
    }
    for (long a = 0; a < m; ++a) {
        row_deg[a] = tok.take(pos, "row degree");
        if (row_deg[a] <= 0 || row_deg[a] > max_row)
            fail("row degree out of range for check " + std::to_string(a + 1), pos - 1);
    }

    // column lists (bit -> checks), padded with zeros up to max_col
    std::vector<std::set<int>> col_sets(n);
    for (long i = 0; i < n; ++i) {
        long got = 0;
        for (long k = 0; k < max_col; ++k) {
            size_t at = pos;
            long v = tok.take(pos, "column entry");
            if (v == 0) continue;
            if (v < 1 || v > m)
                fail("bit " + std::to_string(i + 1) + " references check " + std::to_string(v) +
                         " out of range",
                     at);
            if (!col_sets[i].insert(static_cast<int>(v - 1)).second)
                fail("duplicate entry in column " + std::to_string(i + 1), at);
            ++got;
        }
        if (got != col_deg[i])
            fail("column " + std::to_string(i + 1) + " has " + std::to_string(got) +
                     " entries, degree list says " + std::to_string(col_deg[i]),
                 pos - 1);
    }

    // row lists (check -> bits), order is authoritative for edge ids
    std::vector<std::vector<int>> checks(m);
    for (long a = 0; a < m; ++a) {
        for (long k = 0; k < max_row; ++k) {
            size_t at = pos;
            long v = tok.take(pos, "row entry");
            if (v == 0) continue;
            if (v < 1 || v > n)
                fail("check " + std::to_string(a + 1) + " references bit " + std::to_string(v) +
                         " out of range",
                     at);
            checks[a].push_back(static_cast<int>(v - 1));
        }
        if (static_cast<long>(checks[a].size()) != row_deg[a])
            fail("row " + std::to_string(a + 1) + " has " + std::to_string(checks[a].size()) +
                     " entries, degree list says " + std::to_string(row_deg[a]),
                 pos - 1);
    }

    // cross-check the two neighbor lists
    for (long a = 0; a < m; ++a)
        for (int i : checks[a])
            if (!col_sets[i].count(static_cast<int>(a)))
                throw std::runtime_error("alist: row/column lists inconsistent at check " +
                                         std::to_string(a + 1) + ", bit " + std::to_string(i + 1));

    ParityCheckCode code(static_cast<int>(n), std::move(checks));
    if (code.n_edges() != [&] {
            long s = 0;
            for (long d : row_deg) s += d;
            return s;
        }())
        throw std::runtime_error("alist: degree bookkeeping mismatch");
    return code;
}

std::string emit_alist(const ParityCheckCode& code) {
    std::ostringstream out;
    int n = code.n_bits(), m = code.n_checks();
    int max_col = code.max_bit_degree(), max_row = code.max_check_degree();
    out << n << ' ' << m << '\n' << max_col << ' ' << max_row << '\n';
    for (int i = 0; i < n; ++i) out << code.bit_degree(i) << (i + 1 < n ? ' ' : '\n');
    for (int a = 0; a < m; ++a) out << code.check_degree(a) << (a + 1 < m ? ' ' : '\n');
    for (int i = 0; i < n; ++i) {
        const auto& nb = code.bit_neighbors(i);
        for (int k = 0; k < max_col; ++k)
            out << (k < static_cast<int>(nb.size()) ? nb[k] + 1 : 0) << (k + 1 < max_col ? ' ' : '\n');
    }
    for (int a = 0; a < m; ++a) {
        const auto& nb = code.check_neighbors(a);
        for (int k = 0; k < max_row; ++k)
            out << (k < static_cast<int>(nb.size()) ? nb[k] + 1 : 0) << (k + 1 < max_row ? ' ' : '\n');
    }
    return out.str();
}

ParityCheckCode load_alist_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_alist(ss.str());
}

void save_alist_file(const ParityCheckCode& code, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out << emit_alist(code);
}

std::string emit_code_json(const ParityCheckCode& code) {
    std::ostringstream out;
    out << "{\"n\":" << code.n_bits() << ",\"m\":" << code.n_checks() << ",\"checks\":[";
    for (int a = 0; a < code.n_checks(); ++a) {
        if (a) out << ',';
        out << '[';
        const auto& nb = code.check_neighbors(a);
        for (size_t k = 0; k < nb.size(); ++k) {
            if (k) out << ',';
            out << nb[k];
        }
        out << ']';
    }
    out << "]}";
    return out.str();
}

ParityCheckCode build_tanner_155() {
    constexpr int p = 31;
    std::vector<std::vector<int>> checks(3 * p);
    // shift(a,b) = 5^a * 2^b mod 31 (5 has order 3, 2 has order 5 mod 31)
    for (int a = 0; a < 3; ++a) {
        long sa = 1;
        for (int t = 0; t < a; ++t) sa = sa * 5 % p;
        for (int b = 0; b < 5; ++b) {
            long s = sa;
            for (int t = 0; t < b; ++t) s = s * 2 % p;
            for (int r = 0; r < p; ++r)
                checks[a * p + r].push_back(b * p + static_cast<int>((r + s) % p));
        }
    }
    return ParityCheckCode(5 * p, std::move(checks));
}

namespace {

// Row-reduced basis of the codeword space (spin -> bit domain) for
// enumeration; returns free columns and a back-substitution recipe.
struct Gf2System {
    std::vector<std::vector<std::uint64_t>> rows;  // reduced H rows as bitsets
    std::vector<int> pivot_col;                    // per reduced row
    std::vector<int> free_cols;
    int n = 0;

    static Gf2System reduce(const ParityCheckCode& code) {
        Gf2System s;
        s.n = code.n_bits();
        int words = (s.n + 63) / 64;
        std::vector<std::vector<std::uint64_t>> rows(code.n_checks(),
                                                     std::vector<std::uint64_t>(words, 0));
        for (int a = 0; a < code.n_checks(); ++a)
            for (int i : code.check_neighbors(a)) rows[a][i / 64] ^= 1ULL << (i % 64);

        std::vector<char> is_pivot(s.n, 0);
        int r = 0;
        for (int c = 0; c < s.n && r < static_cast<int>(rows.size()); ++c) {
            int piv = -1;
            for (int k = r; k < static_cast<int>(rows.size()); ++k)
                if (rows[k][c / 64] >> (c % 64) & 1) {
                    piv = k;
                    break;
                }
            if (piv < 0) continue;
            std::swap(rows[r], rows[piv]);
            for (int k = 0; k < static_cast<int>(rows.size()); ++k)
                if (k != r && (rows[k][c / 64] >> (c % 64) & 1))
                    for (int w = 0; w < words; ++w) rows[k][w] ^= rows[r][w];
            s.pivot_col.push_back(c);
            is_pivot[c] = 1;
            ++r;
        }
        // rows are fully reduced only after the whole sweep
        s.rows.assign(rows.begin(), rows.begin() + r);
        for (int c = 0; c < s.n; ++c)
            if (!is_pivot[c]) s.free_cols.push_back(c);
        return s;
    }
};

}  // namespace

std::vector<Codeword> enumerate_codewords(const ParityCheckCode& code) {
    Gf2System sys = Gf2System::reduce(code);
    int k = static_cast<int>(sys.free_cols.size());
    if (k > 24)
        throw std::invalid_argument("enumerate_codewords: dimension " + std::to_string(k) +
                                    " exceeds the 2^24 guard");
    std::vector<Codeword> out;
    out.reserve(1u << k);
    std::vector<int> bits(code.n_bits());
    for (std::uint32_t mask = 0; mask < (1u << k); ++mask) {
        std::fill(bits.begin(), bits.end(), 0);
        for (int j = 0; j < k; ++j)
            if (mask >> j & 1) bits[sys.free_cols[j]] = 1;
        // back-substitute pivots
        for (size_t r = 0; r < sys.rows.size(); ++r) {
            int parity = 0;
            for (int j = 0; j < k; ++j)
                if ((mask >> j & 1) &&
                    (sys.rows[r][sys.free_cols[j] / 64] >> (sys.free_cols[j] % 64) & 1))
                    parity ^= 1;
            bits[sys.pivot_col[r]] = parity;
        }
        Codeword cw;
        cw.spins.resize(code.n_bits());
        for (int i = 0; i < code.n_bits(); ++i) cw.spins[i] = 1 - 2 * bits[i];
        out.push_back(std::move(cw));
    }
    return out;
}

std::vector<int> syndrome(const ParityCheckCode& code, const std::vector<int>& spins) {
    if (static_cast<int>(spins.size()) != code.n_bits())
        throw std::invalid_argument("syndrome: spin vector length mismatch");
    std::vector<int> out(code.n_checks(), 1);
    for (int a = 0; a < code.n_checks(); ++a)
        for (int i : code.check_neighbors(a)) out[a] *= spins[i];
    return out;
}

bool syndrome_ok(const ParityCheckCode& code, const std::vector<int>& spins) {
    auto s = syndrome(code, spins);
    return std::all_of(s.begin(), s.end(), [](int v) { return v == 1; });
}

int gf2_rank(const ParityCheckCode& code) {
    return static_cast<int>(Gf2System::reduce(code).rows.size());
}

int girth(const ParityCheckCode& code) {
    int n = code.n_bits(), m = code.n_checks();
    int best = 0;
    std::vector<int> dist(n + m), parent(n + m);
    for (int s = 0; s < n + m; ++s) {
        std::fill(dist.begin(), dist.end(), -1);
        std::fill(parent.begin(), parent.end(), -1);
        std::deque<int> q{s};
        dist[s] = 0;
        while (!q.empty()) {
            int u = q.front();
            q.pop_front();
            auto visit = [&](int v) {
                if (v == parent[u]) return;
                if (dist[v] >= 0) {
                    int len = dist[u] + dist[v] + 1;
                    if (best == 0 || len < best) best = len;
                } else {
                    dist[v] = dist[u] + 1;
                    parent[v] = u;
                    q.push_back(v);
                }
            };
            if (u < n)
                for (int a : code.bit_neighbors(u)) visit(n + a);
            else
                for (int i : code.check_neighbors(u - n)) visit(i);
        }
    }
    return best;
}

}  // namespace loopdec
