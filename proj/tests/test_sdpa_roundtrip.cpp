#include <cmath>
#include <map>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "doctest.h"
#include "ksb/sdp.hpp"
#include "ksb/sos.hpp"

using namespace ksb;

namespace {

const double kRt2 = std::sqrt(2.0);

// Minimal independent reader for the sparse SDPA text format: block sizes
// (negative = diagonal), right-hand side, and quintuple entries
// `matno blockno i j value` with 1-based upper-triangle indices.
struct SdpaFile {
  int m = 0;
  std::vector<int> block_sizes;  // signed, as written
  std::vector<double> rhs;
  // (matno, blockno, i, j) -> value
  std::map<std::tuple<int, int, int, int>, double> entries;
};

SdpaFile parse_sdpa(std::istream& in) {
  SdpaFile f;
  int nblocks = 0;
  in >> f.m >> nblocks;
  f.block_sizes.resize(nblocks);
  for (auto& s : f.block_sizes) in >> s;
  f.rhs.resize(f.m);
  for (auto& v : f.rhs) in >> v;
  int mat, blk, i, j;
  double val;
  while (in >> mat >> blk >> i >> j >> val)
    f.entries[{mat, blk, i, j}] = val;
  return f;
}

// Rebuild the svec coefficient vector of matrix `mat` from parsed entries,
// inverting the free-variable split and the sqrt(2) svec convention.
Eigen::VectorXd reconstruct(const SdpaFile& f, const SdpProblem& p, int mat) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(p.vec_dim());
  int off = 0;
  for (std::size_t b = 0; b < p.blocks.size(); ++b) {
    const SdpBlock& blk = p.blocks[b];
    const int blkno = static_cast<int>(b) + 1;
    if (blk.kind == BlockKind::Psd) {
      for (int j = 0; j < blk.dim; ++j)
        for (int i = 0; i <= j; ++i) {
          auto it = f.entries.find({mat, blkno, i + 1, j + 1});
          if (it == f.entries.end()) continue;
          double v = it->second;
          out[off + SdpProblem::tri_index(i, j)] = (i == j) ? v : v * kRt2;
        }
    } else {
      for (int k = 0; k < blk.dim; ++k) {
        auto it = f.entries.find({mat, blkno, k + 1, k + 1});
        if (it != f.entries.end()) out[off + k] = it->second;
        if (blk.kind == BlockKind::Free) {
          // The negated partner entry must mirror the positive one.
          auto neg = f.entries.find({mat, blkno, blk.dim + k + 1, blk.dim + k + 1});
          if (it == f.entries.end()) {
            CHECK(neg == f.entries.end());
          } else {
            REQUIRE(neg != f.entries.end());
            CHECK(neg->second == doctest::Approx(-it->second));
          }
        }
      }
    }
    off += blk.vec_size();
  }
  return out;
}

SdpProblem sample_problem() {
  SdpProblem p;
  p.blocks = {{BlockKind::Psd, 2}, {BlockKind::Diag, 2}, {BlockKind::Free, 1}};
  p.a.resize(2, 6);
  std::vector<Eigen::Triplet<double>> trips = {
      {0, 0, 1.0},  {0, 1, 0.5 * kRt2}, {0, 3, 2.0},
      {1, 2, -1.0}, {1, 4, 3.0},        {1, 5, -2.5}};
  p.a.setFromTriplets(trips.begin(), trips.end());
  p.b.resize(2);
  p.b << 1.5, -0.75;
  p.c.resize(6);
  p.c << 1.0, kRt2, 0.0, 0.5, 0.0, -1.0;
  return p;
}

}  // namespace

TEST_CASE("sdpa export round trip on a mixed-block problem") {
  SdpProblem p = sample_problem();
  std::ostringstream os;
  export_sdpa(p, os);
  std::istringstream in(os.str());
  SdpaFile f = parse_sdpa(in);

  CHECK(f.m == 2);
  REQUIRE(f.block_sizes.size() == 3);
  CHECK(f.block_sizes[0] == 2);   // psd block
  CHECK(f.block_sizes[1] == -2);  // diagonal block
  CHECK(f.block_sizes[2] == -2);  // free scalar doubled into x+ - x-
  REQUIRE(f.rhs.size() == 2);
  CHECK(f.rhs[0] == doctest::Approx(1.5));
  CHECK(f.rhs[1] == doctest::Approx(-0.75));

  Eigen::VectorXd c = reconstruct(f, p, 0);
  CHECK((c - p.c).norm() <= 1e-14);
  for (int row = 0; row < 2; ++row) {
    Eigen::VectorXd a = reconstruct(f, p, row + 1);
    Eigen::VectorXd expect = p.a.row(row);
    CHECK((a - expect).norm() <= 1e-14);
  }
  // Only upper-triangle entries may appear.
  for (const auto& [key, value] : f.entries) {
    auto [mat, blk, i, j] = key;
    CHECK(i <= j);
    CHECK(value != 0.0);
  }
}

TEST_CASE("exported program text is stable") {
  // Golden header for a tiny fixed program: the counts and block layout
  // must never change silently, since downstream solvers parse them.
  SosProgram prog = build_truncated_program(3, 2.0, 2);
  SdpProblem sdp = to_sdp(prog);
  std::ostringstream os;
  export_sdpa(sdp, os);
  std::istringstream in(os.str());
  std::string line1, line2, line3;
  std::getline(in, line1);
  std::getline(in, line2);
  std::getline(in, line3);
  CHECK(line1 == std::to_string(sdp.b.size()));
  CHECK(line2 == std::to_string(sdp.blocks.size()));
  // Two parity Gram blocks, the leading-coefficient slack (diagonal, size
  // -1), then the doubled free block.
  std::istringstream dims(line3);
  std::vector<int> sizes;
  int v;
  while (dims >> v) sizes.push_back(v);
  REQUIRE(sizes.size() == sdp.blocks.size());
  REQUIRE(sizes.size() >= 4);
  CHECK(sizes.back() < 0);
  CHECK(sizes[sizes.size() - 2] == -1);
  for (std::size_t i = 0; i + 2 < sizes.size(); ++i) CHECK(sizes[i] > 0);

  std::istringstream full(os.str());
  SdpaFile f = parse_sdpa(full);
  CHECK(f.m == sdp.b.size());
}
