#include <doctest.h>

#include <cmath>

#include "lps/metrics.hpp"
#include "lps/phantom.hpp"
#include "lps/svd.hpp"
#include "oracles.hpp"

using namespace lps;

TEST_CASE("rank-1 static phantom has Casorati rank 1") {
  PhantomSpec spec;
  spec.background_rank = 1;
  spec.n_blobs = 0;
  spec.seed = 3;
  const Phantom ph = generate_phantom(spec);
  const SvdFactors f = svd(casorati(ph.x));
  CHECK(f.sigma[1] / f.sigma[0] < 1e-10);
}

TEST_CASE("default phantom: rank, sparsity, normalization, exact split") {
  PhantomSpec spec;
  spec.seed = 11;
  const Phantom ph = generate_phantom(spec);

  const SvdFactors f = svd(casorati(ph.L_true));
  CHECK(f.sigma[Eigen::Index(spec.background_rank)] / f.sigma[0] < 1e-10);

  for (std::size_t t = 0; t < spec.nt; ++t) {
    std::size_t nonzero = 0;
    for (std::size_t i = 0; i < spec.nx; ++i)
      for (std::size_t j = 0; j < spec.ny; ++j)
        nonzero += std::abs(ph.S_true.at(i, j, t)) > 0.0;
    CHECK(double(nonzero) / double(spec.nx * spec.ny) <= 0.10);
  }

  double peak = 0.0;
  for (std::size_t i = 0; i < ph.x.size(); ++i)
    peak = std::max(peak, std::abs(ph.x[i]));
  CHECK(peak == doctest::Approx(1.0).epsilon(1e-12));

  const ComplexTensor diff = ph.x - (ph.L_true + ph.S_true);
  CHECK(norm2(diff) == 0.0);
}

TEST_CASE("phantom generation is deterministic") {
  PhantomSpec spec;
  spec.seed = 21;
  const Phantom a = generate_phantom(spec);
  const Phantom b = generate_phantom(spec);
  for (std::size_t i = 0; i < a.x.size(); ++i)
    CHECK(a.x[i] == b.x[i]);
}

TEST_CASE("blob support covers exactly the dynamic component") {
  PhantomSpec spec;
  spec.seed = 31;
  const Phantom ph = generate_phantom(spec);
  const ComplexTensor sup = blob_support(ph);
  for (std::size_t i = 0; i < sup.size(); ++i) {
    const bool inside = sup[i].real() > 0.0;
    const bool nonzero = std::abs(ph.S_true[i]) > 0.0;
    CHECK(inside == nonzero);
  }
}

TEST_CASE("full mask, zero noise sample inverts exactly") {
  PhantomSpec spec;
  spec.nx = spec.ny = 16;
  spec.nt = 4;
  spec.seed = 41;
  const TrainSample s =
      make_sample(spec, MaskConfig{1.0, 0, 5}, CoilConfig{}, 0.0);
  const ComplexTensor back = adjoint(s.y, s.op);
  CHECK(norm2(back - s.x_ref) <= 1e-12 * norm2(s.x_ref));
}

TEST_CASE("af=4 zero-filled PSNR falls in the frozen band") {
  PhantomSpec spec;
  spec.seed = 42;
  const TrainSample s =
      make_sample(spec, MaskConfig{4.0, 4, 43}, CoilConfig{}, 0.0);
  const double p = psnr(adjoint(s.y, s.op), s.x_ref);
  CHECK(p > 8.0);
  CHECK(p < 35.0);
}

TEST_CASE("sample generation is deterministic") {
  PhantomSpec spec;
  spec.seed = 51;
  const TrainSample a =
      make_sample(spec, MaskConfig{4.0, 4, 52}, CoilConfig{}, 1e-3);
  const TrainSample b =
      make_sample(spec, MaskConfig{4.0, 4, 52}, CoilConfig{}, 1e-3);
  for (std::size_t i = 0; i < a.y.size(); ++i)
    CHECK(a.y[i] == b.y[i]);
}

TEST_CASE("noise lands only on sampled entries") {
  PhantomSpec spec;
  spec.seed = 61;
  const TrainSample clean =
      make_sample(spec, MaskConfig{4.0, 4, 62}, CoilConfig{}, 0.0);
  const TrainSample noisy =
      make_sample(spec, MaskConfig{4.0, 4, 62}, CoilConfig{}, 1e-2);
  const SamplingMask &m = clean.op.mask();
  bool changed = false;
  for (std::size_t i = 0; i < 32; ++i)
    for (std::size_t j = 0; j < 32; ++j)
      for (std::size_t t = 0; t < 8; ++t) {
        if (!m.at((j + 16) % 32, t))
          CHECK(noisy.y.at(i, j, t) == cplx(0.0, 0.0));
        else if (noisy.y.at(i, j, t) != clean.y.at(i, j, t))
          changed = true;
      }
  CHECK(changed);
}

TEST_CASE("spec validation rejects bad parameters") {
  PhantomSpec spec;
  spec.background_rank = 20; // > nt
  CHECK_THROWS(generate_phantom(spec));
  PhantomSpec tiny;
  tiny.nx = 4; // below minimum extent
  CHECK_THROWS(generate_phantom(tiny));
}
