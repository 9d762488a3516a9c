#include "hsd/error.hpp"
#include "hsd/hermlin.hpp"
#include "oracles.hpp"

#include <doctest.h>

using namespace hsd;

namespace {

HermitianOperator pauli_x() {
  ComplexMatrix m(2, 2);
  m << 0, 1, 1, 0;
  return HermitianOperator(m);
}

HermitianOperator pauli_y() {
  ComplexMatrix m(2, 2);
  m << 0, Complex(0, -1), Complex(0, 1), 0;
  return HermitianOperator(m);
}

HermitianOperator pauli_z() { return HermitianOperator::diagonal(RealVector::Map(std::vector<double>{1, -1}.data(), 2)); }

HermitianOperator diag(std::initializer_list<double> v) {
  std::vector<double> d(v);
  return HermitianOperator::diagonal(RealVector::Map(d.data(), static_cast<Eigen::Index>(d.size())));
}

HermitianOperator random_op(oracle::Rng& rng, std::size_t da, std::size_t db) {
  return HermitianOperator(oracle::random_hermitian(rng, static_cast<Eigen::Index>(da * db)),
                           BipartiteShape{da, db});
}

}  // namespace

TEST_CASE("construction rejects non-Hermitian input and symmetrizes small noise") {
  ComplexMatrix m(2, 2);
  m << 1, 2, 0, 1;
  CHECK_THROWS_AS(HermitianOperator{m}, InputError);
  m << 1, Complex(0.5, 1e-10), 0.5, 1;
  HermitianOperator h(m);
  CHECK(hermiticity_deviation(h.matrix()) == 0.0);
  CHECK_THROWS_AS(HermitianOperator(ComplexMatrix::Identity(4, 4), BipartiteShape{3, 2}), InputError);
  m << 1, 2, 0, 1;
  CHECK_THROWS_AS(hermitian_eig(ComplexMatrix(m)), InputError);
}

TEST_CASE("tensor") {
  CHECK(oracle::max_abs_diff(tensor(HermitianOperator::identity(2), HermitianOperator::identity(2)).matrix(),
                             ComplexMatrix::Identity(4, 4)) == 0.0);
  const HermitianOperator t = tensor(diag({1, 0}), diag({0, 1}));
  CHECK(oracle::max_abs_diff(t.matrix(), diag({0, 1, 0, 0}).matrix()) == 0.0);
  REQUIRE(t.shape());
  CHECK(*t.shape() == BipartiteShape{2, 2});

  const std::vector<double> ev = oracle::spectrum(tensor(pauli_z(), pauli_z()).matrix());
  CHECK(ev[0] == doctest::Approx(1));
  CHECK(ev[1] == doctest::Approx(1));
  CHECK(ev[2] == doctest::Approx(-1));
  CHECK(ev[3] == doctest::Approx(-1));

  oracle::Rng rng(11);
  const ComplexMatrix a = oracle::random_hermitian(rng, 3), b = oracle::random_hermitian(rng, 2);
  CHECK(oracle::max_abs_diff(tensor(HermitianOperator(a), HermitianOperator(b)).matrix(),
                             oracle::naive_kron(a, b)) < 1e-14);
}

TEST_CASE("partial trace") {
  oracle::Rng rng(1);
  const ComplexMatrix r = oracle::random_density(rng, 2), s = oracle::random_density(rng, 3);
  const HermitianOperator rs = tensor(HermitianOperator(r), HermitianOperator(s));
  CHECK(oracle::max_abs_diff(partial_trace(rs, Subsystem::B).matrix(), r * s.trace()) < 1e-14);
  CHECK(oracle::max_abs_diff(partial_trace(rs, Subsystem::A).matrix(), s * r.trace()) < 1e-14);

  const HermitianOperator phi = max_entangled(2, true);
  CHECK(oracle::max_abs_diff(partial_trace(phi, Subsystem::B).matrix(), 0.5 * ComplexMatrix::Identity(2, 2)) < 1e-15);
  CHECK(oracle::max_abs_diff(partial_trace(swap_operator(2), Subsystem::A).matrix(), ComplexMatrix::Identity(2, 2)) <
        1e-15);

  const HermitianOperator x = random_op(rng, 3, 2);
  CHECK(oracle::max_abs_diff(partial_trace(x, Subsystem::B).matrix(), oracle::naive_trace_b(x.matrix(), 3, 2)) < 1e-13);
  CHECK(oracle::max_abs_diff(partial_trace(x, Subsystem::A).matrix(), oracle::naive_trace_a(x.matrix(), 3, 2)) < 1e-13);
  CHECK(partial_trace(x, Subsystem::B).trace() == doctest::Approx(x.trace()).epsilon(1e-12));
  CHECK_THROWS_AS(partial_trace(HermitianOperator::identity(4), Subsystem::B), InputError);
}

TEST_CASE("partial transpose") {
  oracle::Rng rng(2);
  const ComplexMatrix a = oracle::random_hermitian(rng, 2), b = oracle::random_hermitian(rng, 3);
  const HermitianOperator ab = tensor(HermitianOperator(a), HermitianOperator(b));
  CHECK(oracle::max_abs_diff(partial_transpose(ab, Subsystem::B).matrix(), oracle::naive_kron(a, b.transpose())) <
        1e-14);
  CHECK(oracle::max_abs_diff(partial_transpose(ab, Subsystem::A).matrix(), oracle::naive_kron(a.transpose(), b)) <
        1e-14);

  for (std::size_t d : {2u, 3u}) {
    CHECK(oracle::max_abs_diff(partial_transpose(swap_operator(d), Subsystem::B).matrix(),
                               max_entangled(d, false).matrix()) < 1e-15);
  }
  const HermitianOperator x = random_op(rng, 3, 3);
  CHECK(partial_transpose(partial_transpose(x, Subsystem::B), Subsystem::B).matrix() == x.matrix());
  CHECK(oracle::max_abs_diff(partial_transpose(x, Subsystem::B).matrix(), oracle::naive_transpose_b(x.matrix(), 3, 3)) ==
        0.0);
  CHECK_THROWS_AS(partial_transpose(HermitianOperator::identity(4), Subsystem::B), InputError);
}

TEST_CASE("partial transpose invariants on random operators") {
  oracle::Rng rng(3);
  for (int k = 0; k < 20; ++k) {
    const HermitianOperator x = random_op(rng, 2, 3), l = random_op(rng, 2, 3), s = random_op(rng, 2, 3);
    const HermitianOperator tx = partial_transpose(x, Subsystem::B);
    CHECK(tx.trace() == doctest::Approx(x.trace()).epsilon(1e-12));
    CHECK(hermiticity_deviation(tx.matrix()) <= 1e-12 * (1 + tx.max_abs()));
    const double lhs = (partial_transpose(l, Subsystem::B).matrix() * s.matrix()).trace().real();
    const double rhs = (l.matrix() * partial_transpose(s, Subsystem::B).matrix()).trace().real();
    CHECK(std::abs(lhs - rhs) < 1e-10);
  }
}

TEST_CASE("positive part") {
  CHECK(oracle::max_abs_diff(positive_part(diag({0.3, -0.3})).matrix(), diag({0.3, 0}).matrix()) < 1e-15);
  oracle::Rng rng(4);
  const ComplexMatrix psd = oracle::random_density(rng, 4);
  CHECK(oracle::max_abs_diff(positive_part(HermitianOperator(psd)).matrix(), psd) < 1e-13);
  for (int k = 0; k < 10; ++k) {
    const HermitianOperator x(oracle::random_hermitian(rng, 5));
    const HermitianOperator pp = positive_part(x);
    CHECK(pp.trace() == doctest::Approx(oracle::positive_sum(x.matrix())).epsilon(1e-10));
    CHECK(oracle::min_eig(pp.matrix()) > -1e-10);
    CHECK(oracle::max_eig((x - pp).matrix()) < 1e-10);
    const double tn = pp.trace() + positive_part(-x).trace();
    CHECK(tn == doctest::Approx(trace_norm(x)).epsilon(1e-10));
    double abs_sum = 0;
    for (double v : oracle::spectrum(x.matrix())) abs_sum += std::abs(v);
    CHECK(tn == doctest::Approx(abs_sum).epsilon(1e-10));
  }
}

TEST_CASE("hermitian eigendecomposition") {
  EigenDecomposition e = hermitian_eig(HermitianOperator::identity(3));
  CHECK(e.values == RealVector::Ones(3));
  e = hermitian_eig(pauli_x());
  CHECK(e.values[0] == doctest::Approx(1));
  CHECK(e.values[1] == doctest::Approx(-1));

  oracle::Rng rng(5);
  const HermitianOperator x(oracle::random_hermitian(rng, 9));
  e = hermitian_eig(x);
  for (Eigen::Index k = 1; k < e.values.size(); ++k) CHECK(e.values[k - 1] >= e.values[k]);
  const ComplexMatrix rec = e.vectors * e.values.cast<Complex>().asDiagonal() * e.vectors.adjoint();
  CHECK((rec - x.matrix()).norm() / x.matrix().norm() <= 1e-10);
  const std::vector<double> ref = oracle::spectrum(x.matrix());
  for (std::size_t k = 0; k < ref.size(); ++k) CHECK(e.values[static_cast<Eigen::Index>(k)] == doctest::Approx(ref[k]));
}

TEST_CASE("swap and symmetric projectors") {
  const HermitianOperator f = swap_operator(2);
  // F|01> = |10>: column 1 has its single 1 in row 2.
  CHECK(f.matrix()(2, 1) == Complex(1));
  CHECK(f.matrix().col(1).cwiseAbs().sum() == 1.0);
  for (std::size_t d : {2u, 3u, 4u}) {
    const HermitianOperator fd = swap_operator(d);
    CHECK(fd.trace() == doctest::Approx(static_cast<double>(d)));
    CHECK(oracle::max_abs_diff(fd.matrix() * fd.matrix(), ComplexMatrix::Identity(d * d, d * d)) < 1e-15);
    const auto [sym, asym] = sym_asym_projectors(d);
    CHECK(sym.trace() == doctest::Approx(d * (d + 1) / 2.0));
    CHECK(asym.trace() == doctest::Approx(d * (d - 1) / 2.0));
    CHECK(oracle::max_abs_diff((sym + asym).matrix(), ComplexMatrix::Identity(d * d, d * d)) < 1e-15);
    CHECK((sym.matrix() * asym.matrix()).cwiseAbs().maxCoeff() < 1e-15);
    CHECK(oracle::max_abs_diff(sym.matrix() * sym.matrix(), sym.matrix()) < 1e-15);
    CHECK(oracle::max_abs_diff(asym.matrix() * asym.matrix(), asym.matrix()) < 1e-15);
  }
}

TEST_CASE("maximally entangled operator") {
  const HermitianOperator phi = max_entangled(2, true);
  CHECK(phi.trace() == doctest::Approx(1));
  const std::vector<double> ev = oracle::spectrum(phi.matrix());
  CHECK(ev[0] == doctest::Approx(1));
  CHECK(std::abs(ev[1]) < 1e-14);
  CHECK(max_entangled(3, false).trace() == doctest::Approx(3));
  for (std::size_t d : {2u, 3u, 4u}) {
    const HermitianOperator p = max_entangled(d, true);
    CHECK(oracle::max_abs_diff(partial_trace(p, Subsystem::B).matrix(),
                               ComplexMatrix::Identity(d, d) / static_cast<double>(d)) < 1e-15);
    CHECK(oracle::max_abs_diff(partial_transpose(p, Subsystem::B).matrix(),
                               swap_operator(d).matrix() / static_cast<double>(d)) < 1e-15);
  }
}

TEST_CASE("real embedding") {
  oracle::Rng rng(6);
  const RealMatrix r = oracle::random_hermitian(rng, 3).real();
  const RealMatrix e = real_embedding(HermitianOperator(ComplexMatrix(r.cast<Complex>())));
  CHECK((e.topLeftCorner(3, 3) - r).norm() == 0.0);
  CHECK((e.bottomRightCorner(3, 3) - r).norm() == 0.0);
  CHECK(e.topRightCorner(3, 3).norm() == 0.0);

  Eigen::SelfAdjointEigenSolver<RealMatrix> es(real_embedding(pauli_y()));
  CHECK(es.eigenvalues()[0] == doctest::Approx(-1));
  CHECK(es.eigenvalues()[1] == doctest::Approx(-1));
  CHECK(es.eigenvalues()[2] == doctest::Approx(1));
  CHECK(es.eigenvalues()[3] == doctest::Approx(1));

  int agree = 0;
  for (int k = 0; k < 50; ++k) {
    ComplexMatrix x = oracle::random_hermitian(rng, 4);
    x += (0.3 * (k % 3) - 0.3) * 4.0 * ComplexMatrix::Identity(4, 4);
    const bool psd_x = oracle::min_eig(x) >= 0;
    Eigen::SelfAdjointEigenSolver<RealMatrix> ee(real_embedding(HermitianOperator(x)));
    const bool psd_e = ee.eigenvalues().minCoeff() >= 0;
    agree += psd_x == psd_e;
    // Spectrum doubles in multiplicity.
    const std::vector<double> ref = oracle::spectrum(x);
    for (std::size_t i = 0; i < 4; ++i) {
      CHECK(ee.eigenvalues()[7 - 2 * static_cast<Eigen::Index>(i)] == doctest::Approx(ref[i]).epsilon(1e-9));
      CHECK(ee.eigenvalues()[6 - 2 * static_cast<Eigen::Index>(i)] == doctest::Approx(ref[i]).epsilon(1e-9));
    }
  }
  CHECK(agree == 50);
  const HermitianOperator x(oracle::random_hermitian(rng, 3));
  CHECK(oracle::max_abs_diff(from_real_embedding(real_embedding(x)).matrix(), x.matrix()) < 1e-15);
}

TEST_CASE("partial trace inverts the tensor product up to trace weights") {
  oracle::Rng rng(7);
  const HermitianOperator a(oracle::random_hermitian(rng, 2)), b(oracle::random_hermitian(rng, 3));
  const HermitianOperator ab = tensor(a, b);
  CHECK(oracle::max_abs_diff(partial_trace(ab, Subsystem::B).matrix(), b.trace() * a.matrix()) < 1e-13);
  CHECK(oracle::max_abs_diff(partial_trace(ab, Subsystem::A).matrix(), a.trace() * b.matrix()) < 1e-13);
}
