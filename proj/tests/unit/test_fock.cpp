#include "doctest.h"

#include <algorithm>

#include "helpers.hpp"
#include "fermix/errors.hpp"
#include "fermix/fock.hpp"

using namespace fermix;

namespace {
long binom(int n, int k) {
  long r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}
}  // namespace

TEST_CASE("determinant enumeration") {
  for (int M : {1, 4, 10, 12})
    for (int N = 0; N <= std::min(M, 5); ++N) {
      const DeterminantBasis b = enumerate_determinants(M, N);
      CHECK(b.size() == binom(M, N));
      CHECK(std::is_sorted(b.dets.begin(), b.dets.end()));
      for (int i = 0; i < b.size(); ++i) {
        CHECK(__builtin_popcountll(b.dets[i]) == N);
        CHECK(b.index_of(b.dets[i]) == i);
      }
    }
  CHECK(enumerate_determinants(4, 2).index_of(0b10001) == -1);
  CHECK_THROWS_AS(enumerate_determinants(3, 4), ConfigError);
  CHECK_THROWS_AS(enumerate_determinants(64, 1), ConfigError);
  CHECK(make_determinant_basis(6, 3).get() == make_determinant_basis(6, 3).get());
}

TEST_CASE("sign convention of the annihilator") {
  CHECK(fermion_sign(0b1011, 0) == 1.0);
  CHECK(fermion_sign(0b1011, 1) == -1.0);
  CHECK(fermion_sign(0b1011, 3) == 1.0);
  CHECK(lowest_mask(3) == 0b111);
  CHECK(lowest_mask(0) == 0);
}

TEST_CASE("excitation table matches an occupation-list oracle") {
  const DeterminantBasis b = enumerate_determinants(6, 3);
  const ExcitationTable t = ExcitationTable::build(b);
  for (int I = 0; I < b.size(); ++I) {
    for (int k = t.by_source_offsets[I]; k < t.by_source_offsets[I + 1]; ++k) {
      const Excitation& e = t.by_source[k];
      std::uint64_t out;
      double sign;
      REQUIRE(testing::apply_hop(b.dets[I], e.pq / 6, e.pq % 6, out, sign));
      CHECK(b.dets[e.det] == out);
      CHECK(e.sign == sign);
    }
    // Every nonvanishing hop appears exactly once.
    int expected = 0;
    for (int p = 0; p < 6; ++p)
      for (int q = 0; q < 6; ++q) {
        std::uint64_t out;
        double sign;
        expected += testing::apply_hop(b.dets[I], p, q, out, sign);
      }
    CHECK(t.by_source_offsets[I + 1] - t.by_source_offsets[I] == expected);
  }
  CHECK(t.by_source.size() == t.by_target.size());
}

TEST_CASE("annihilators anticommute within a species and commute across species") {
  const CIState s = testing::random_state(6, 3, 2, 11);
  for (int p = 0; p < 6; ++p)
    for (int q = 0; q < 6; ++q) {
      const CIState pq = annihilate_orbital(annihilate_orbital(s, Species::A, q), Species::A, p);
      const CIState qp = annihilate_orbital(annihilate_orbital(s, Species::A, p), Species::A, q);
      CHECK((pq.coeff + qp.coeff).norm() < 1e-14);
      const CIState ab = annihilate_orbital(annihilate_orbital(s, Species::B, q), Species::A, p);
      const CIState ba = annihilate_orbital(annihilate_orbital(s, Species::A, p), Species::B, q);
      CHECK((ab.coeff - ba.coeff).norm() < 1e-14);
    }
}

TEST_CASE("number operator from annihilation norms") {
  const CIState s = testing::random_state(7, 3, 2, 5);
  double na = 0.0, nb = 0.0;
  for (int p = 0; p < 7; ++p) {
    na += annihilate_orbital(s, Species::A, p).coeff.squaredNorm();
    nb += annihilate_orbital(s, Species::B, p).coeff.squaredNorm();
  }
  CHECK(na == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(nb == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("field operator is linear in the amplitudes") {
  const CIState s = testing::random_state(5, 2, 2, 3);
  Eigen::VectorXd amp(5);
  amp << 0.3, -1.2, 0.0, 2.5, 0.7;
  const CIState c = annihilate_combination(s, Species::B, amp);
  CoeffMatrix sum = CoeffMatrix::Zero(c.coeff.rows(), c.coeff.cols());
  for (int p = 0; p < 5; ++p) sum += amp(p) * annihilate_orbital(s, Species::B, p).coeff;
  CHECK((sum - c.coeff).norm() < 1e-14);
  CHECK(c.n_b() == 1);
  CHECK(c.n_a() == 2);
  CHECK_THROWS_AS(annihilate_combination(s, Species::A, Eigen::VectorXd::Ones(4)), ConfigError);
  const CIState empty = testing::random_state(5, 2, 0, 1);
  CHECK_THROWS_AS(annihilate_orbital(empty, Species::B, 0), ConfigError);
}

TEST_CASE("Schmidt spectrum") {
  const CIState prod = product_determinant(6, 3, 1, 0b111, 0b1);
  const SchmidtSpectrum sp = schmidt_decompose(prod);
  CHECK(sp.lambdas[0] == doctest::Approx(1.0));
  for (std::size_t k = 1; k < sp.lambdas.size(); ++k) CHECK(sp.lambdas[k] < 1e-24);

  const CIState s = testing::random_state(6, 3, 1, 9);
  const SchmidtSpectrum r = schmidt_decompose(s);
  double total = 0.0;
  for (std::size_t k = 0; k < r.lambdas.size(); ++k) {
    total += r.lambdas[k];
    if (k) CHECK(r.lambdas[k] <= r.lambdas[k - 1]);
  }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
  // Reconstruct C = sum_k sqrt(lambda_k) u_k (x) v_k.
  Eigen::MatrixXcd rec = Eigen::MatrixXcd::Zero(s.coeff.rows(), s.coeff.cols());
  for (std::size_t k = 0; k < r.lambdas.size(); ++k)
    rec += std::sqrt(r.lambdas[k]) * r.vectors_a.col(k) * r.vectors_b.col(k).transpose();
  CHECK((rec - Eigen::MatrixXcd(s.coeff)).norm() < 1e-12);
}
