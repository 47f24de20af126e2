#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace loopdec {

// Binary linear code as a Tanner graph.  Edge ids are dense and
// check-major: edges of check 0 in neighbor-list order, then check 1, ...
// This ordering is part of the on-disk/message-vector contract.
class ParityCheckCode {
  public:
    ParityCheckCode(int n_bits, std::vector<std::vector<int>> check_neighbors);

    int n_bits() const { return n_bits_; }
    int n_checks() const { return static_cast<int>(check_neighbors_.size()); }
    int n_edges() const { return n_edges_; }

    const std::vector<int>& check_neighbors(int a) const { return check_neighbors_[a]; }
    const std::vector<int>& bit_neighbors(int i) const { return bit_neighbors_[i]; }
    int bit_degree(int i) const { return static_cast<int>(bit_neighbors_[i].size()); }
    int check_degree(int a) const { return static_cast<int>(check_neighbors_[a].size()); }

    // dense edge id of (bit i, check a); bit/check endpoints of an edge
    int edge_id(int i, int a) const;
    int edge_bit(int e) const { return edge_bit_[e]; }
    int edge_check(int e) const { return edge_check_[e]; }
    int check_edge_begin(int a) const { return check_edge_begin_[a]; }
    const std::vector<int>& bit_edges(int i) const { return bit_edges_[i]; }

    int max_bit_degree() const;
    int max_check_degree() const;

  private:
    int n_bits_;
    int n_edges_;
    std::vector<std::vector<int>> check_neighbors_;
    std::vector<std::vector<int>> bit_neighbors_;
    std::vector<std::vector<int>> bit_edges_;
    std::vector<int> check_edge_begin_;
    std::vector<int> edge_bit_;
    std::vector<int> edge_check_;
};

struct Codeword {
    std::vector<int> spins;  // +-1, spins[i] = 1 - 2*bits[i]

    std::vector<int> bits() const {
        std::vector<int> b(spins.size());
        for (size_t i = 0; i < spins.size(); ++i) b[i] = (1 - spins[i]) / 2;
        return b;
    }
    int weight() const {
        int w = 0;
        for (int s : spins) w += (s < 0);
        return w;
    }
};

// alist interchange format (1-based indices, zero padding allowed).
ParityCheckCode parse_alist(const std::string& text);
std::string emit_alist(const ParityCheckCode& code);
ParityCheckCode load_alist_file(const std::string& path);
void save_alist_file(const ParityCheckCode& code, const std::string& path);

// JSON mirror of the code structure ({n, m, checks: [[...], ...]}).
std::string emit_code_json(const ParityCheckCode& code);

// Quasi-cyclic (155,64,20) code: 3x5 array of 31x31 circulant permutations,
// block (a,b) shifted by 5^a * 2^b mod 31.
ParityCheckCode build_tanner_155();

// All 2^K codewords of a small code (guard K <= 24), deterministic order:
// sorted by the binary value of the free-bit assignment.
std::vector<Codeword> enumerate_codewords(const ParityCheckCode& code);

// Per-check products prod_{i in a} sigma_i.
std::vector<int> syndrome(const ParityCheckCode& code, const std::vector<int>& spins);
bool syndrome_ok(const ParityCheckCode& code, const std::vector<int>& spins);

// GF(2) rank of H.
int gf2_rank(const ParityCheckCode& code);

// Shortest cycle length in the bipartite Tanner graph counting both bit and
// check vertices (BFS from every vertex); 0 if acyclic.
int girth(const ParityCheckCode& code);

}  // namespace loopdec
