#include <doctest.h>

#include "icpl/flops.hpp"

using namespace icpl;

TEST_CASE("kmeans cost: reference point and degenerate inputs") {
  CHECK(flops::kmeans_gflops(50, 5000, 64, 10) == doctest::Approx(0.16).epsilon(1e-12));
  CHECK(flops::kmeans_gflops(0, 5000, 64, 10) == 0.0);
  CHECK(flops::kmeans_gflops(50, 0, 64, 10) == 0.0);
  CHECK(flops::kmeans_gflops(1, 1, 1, 1) == doctest::Approx(1e-9).epsilon(1e-12));
  CHECK_THROWS_AS(flops::kmeans_gflops(-1, 1, 1, 1), ArgumentError);
}

TEST_CASE("pseudo-label cost: linear in n around the kmeans term") {
  CHECK(flops::pseudo_label_gflops(0.1377, 5000, 0.16) ==
        doctest::Approx(688.66).epsilon(1e-9));
  CHECK(flops::pseudo_label_gflops(0.1377, 0, 0.16) == doctest::Approx(0.16));
  const double once = flops::pseudo_label_gflops(0.2, 100, 0.0);
  const double twice = flops::pseudo_label_gflops(0.2, 200, 0.0);
  CHECK(twice == doctest::Approx(2.0 * once));
}

TEST_CASE("supervised cost") {
  CHECK(flops::supervised_gflops(7000, 170, 0.41) ==
        doctest::Approx(487900.0).epsilon(1e-12));
  CHECK(flops::supervised_gflops(7000, 0, 0.41) == 0.0);
  CHECK(flops::supervised_gflops(7000, 85, 0.41) ==
        doctest::Approx(487900.0 / 2).epsilon(1e-12));
}

TEST_CASE("unsupervised cost: printed total needs 17 recomputes, formula says 18") {
  const double with_17 = flops::unsupervised_gflops(5000, 170, 0.41, 17, 688.66);
  CHECK(with_17 == doctest::Approx(360207.2).epsilon(1e-9));
  CHECK(std::abs(with_17 - 360207.0) < 1.0);

  const double with_18 = flops::unsupervised_gflops(5000, 170, 0.41, 18, 688.66);
  CHECK(with_18 == doctest::Approx(360895.88).epsilon(1e-9));

  CHECK(flops::recompute_count_formula(170, 10) == 18);
  CHECK(flops::recompute_count_effective(170, 10) == 17);

  // pseudo-label share of the total
  const double share = 17 * 688.66 / with_17;
  CHECK(share == doctest::Approx(0.0325).epsilon(0.01));

  // the cost reduction direction vs the supervised step
  const double sup = flops::supervised_gflops(7000, 170, 0.41);
  CHECK(sup > with_17);
  CHECK(100.0 * (sup - with_17) / sup == doctest::Approx(26.17).epsilon(0.001));
}

TEST_CASE("flops model table carries both recompute readings") {
  flops::FlopsModel m;  // defaults are the Base10 Inc10 case study
  CHECK(m.kmeans() == doctest::Approx(0.16));
  CHECK(m.pseudo_labels() == doctest::Approx(688.66));
  CHECK(m.supervised() == doctest::Approx(487900.0));
  CHECK(m.unsupervised() == doctest::Approx(360207.2));
  CHECK(m.unsupervised_with(18) == doctest::Approx(360895.88));
  const std::string table = m.table();
  CHECK(table.find("0.16") != std::string::npos);
  CHECK(table.find("688.66") != std::string::npos);
  CHECK(table.find("487900") != std::string::npos);
  CHECK(table.find("360207") != std::string::npos);
}

TEST_CASE("measured per-image costs from the extractor shape") {
  nn::NetworkSpec spec;
  spec.input_dim = 10;
  spec.hidden_dims = {8};
  spec.embedding_dim = 4;
  // macs: 10*8 + 8*4 + 4*3 = 124
  CHECK(flops::forward_macs(spec, 3) == doctest::Approx(124.0));
  CHECK(flops::inference_gflops_per_image(spec, 3) ==
        doctest::Approx(2.0 * 124.0 / 1e9));
  CHECK(flops::training_gflops_per_image(spec, 3) ==
        doctest::Approx(3.0 * 2.0 * 124.0 / 1e9));
}
