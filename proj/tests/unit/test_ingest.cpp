#include "sgdlab/libsvm.hpp"
#include "sgdlab/synthetic.hpp"

#include <catch2/catch.hpp>

#include <zlib.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "helpers.hpp"

using namespace sgdlab;

TEST_CASE("parse_libsvm handles the basic format", "[ingest]") {
  const Dataset data = parse_libsvm("+1 3:0.5 7:1.25\n-1 1:2.0");
  CHECK(data.n() == 2);
  CHECK(data.dimension == 7);
  CHECK(data.examples[0].label == 1.0);
  CHECK(data.examples[1].label == -1.0);
  CHECK(data.examples[0].features ==
        std::vector<std::pair<int32_t, double>>{{2, 0.5}, {6, 1.25}});
  CHECK(data.examples[1].features == std::vector<std::pair<int32_t, double>>{{0, 2.0}});
}

TEST_CASE("zero-one labels map to minus-one/plus-one", "[ingest]") {
  const Dataset data = parse_libsvm("1 1:1\n0 1:2");
  CHECK(data.examples[0].label == 1.0);
  CHECK(data.examples[1].label == -1.0);
}

TEST_CASE("other label sets need an explicit map", "[ingest]") {
  CHECK_THROWS_AS(parse_libsvm("2 1:1\n4 1:2"), ParseError);
  ParseOptions opts;
  opts.label_map = {{{2.0, 1.0}, {4.0, -1.0}}};
  const Dataset data = parse_libsvm("2 1:1\n4 1:2", opts);
  CHECK(data.examples[0].label == 1.0);
  CHECK(data.examples[1].label == -1.0);

  ParseOptions bad;
  bad.label_map = {{{2.0, 3.0}, {4.0, -1.0}}};
  CHECK_THROWS_AS(parse_libsvm("2 1:1\n4 1:2", bad), ParseError);
}

TEST_CASE("malformed lines report their line number", "[ingest]") {
  try {
    parse_libsvm("+1 1:1\n+1 2:1 2:3");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
  }
  CHECK_THROWS_AS(parse_libsvm("+1 3:1 2:5"), ParseError);   // non-increasing
  CHECK_THROWS_AS(parse_libsvm("+1 1:abc"), ParseError);     // non-numeric value
  CHECK_THROWS_AS(parse_libsvm("abc 1:1"), ParseError);      // non-numeric label
  CHECK_THROWS_AS(parse_libsvm("+1 0:1"), ParseError);       // indices are 1-based
  CHECK_THROWS_AS(parse_libsvm("+1 99999999999999:1"), ParseError);  // index overflow
  CHECK_THROWS_AS(parse_libsvm(""), ParseError);             // empty file
  CHECK_THROWS_AS(parse_libsvm("\n\n"), ParseError);         // only blank lines
}

TEST_CASE("dimension can be overridden upward only", "[ingest]") {
  ParseOptions opts;
  opts.dimension_override = 10;
  CHECK(parse_libsvm("+1 3:1\n-1 2:1", opts).dimension == 10);
  opts.dimension_override = 2;
  CHECK_THROWS_AS(parse_libsvm("+1 3:1", opts), ParseError);
}

TEST_CASE("examples may carry empty feature lists", "[ingest]") {
  const Dataset data = parse_libsvm("+1\n-1 2:1.5");
  CHECK(data.n() == 2);
  CHECK(data.examples[0].features.empty());
}

TEST_CASE("serialize-parse round trip is exact", "[ingest]") {
  Rng rng(31);
  for (int trial = 0; trial < 20; ++trial) {
    Dataset data;
    data.dimension = 1 + static_cast<int32_t>(rng.uniform_index(12));
    const size_t n = 1 + rng.uniform_index(8);
    for (size_t i = 0; i < n; ++i) {
      SparseExample ex;
      ex.label = rng.sign();
      for (int32_t k = 0; k < data.dimension; ++k)
        if (rng.uniform01() < 0.4) ex.features.emplace_back(k, rng.gaussian() * 3.0);
      data.examples.push_back(std::move(ex));
    }
    const Dataset reparsed =
        parse_libsvm(write_libsvm(data), {.dimension_override = data.dimension});
    CHECK(reparsed == data);
  }
}

TEST_CASE("gzip-compressed files load transparently", "[ingest]") {
  namespace fs = std::filesystem;
  const fs::path path = fs::temp_directory_path() / "sgdlab_test_data.gz";
  gzFile f = gzopen(path.string().c_str(), "wb");
  REQUIRE(f != nullptr);
  const std::string text = "+1 1:0.5 3:1.5\n-1 2:2.25\n";
  gzwrite(f, text.data(), static_cast<unsigned>(text.size()));
  gzclose(f);

  const Dataset data = load_libsvm_file(path.string());
  CHECK(data.n() == 2);
  CHECK(data.dimension == 3);
  fs::remove(path);
}

TEST_CASE("max-abs scaling normalizes feature columns", "[ingest]") {
  ParseOptions opts;
  opts.max_abs_scale = true;
  const Dataset data = parse_libsvm("+1 1:2.0 2:-8.0\n-1 1:-4.0", opts);
  CHECK(data.examples[0].features[0].second == 0.5);
  CHECK(data.examples[0].features[1].second == -1.0);
  CHECK(data.examples[1].features[0].second == -1.0);
}

TEST_CASE("parser survives arbitrary byte soup", "[ingest]") {
  // Anything that is not valid input must come back as ParseError, never a
  // crash or an invalid Dataset.
  const std::string alphabet = "+-01239.:eE \t\n\rabcz#";
  Rng rng(424242);
  for (int trial = 0; trial < 300; ++trial) {
    std::string text;
    const size_t len = rng.uniform_index(120);
    for (size_t k = 0; k < len; ++k) text += alphabet[rng.uniform_index(alphabet.size())];
    try {
      const Dataset data = parse_libsvm(text);
      data.validate();
      CHECK(data.n() >= 1);
    } catch (const ParseError&) {
      // expected for most inputs
    }
  }
}

TEST_CASE("quartic noise energies hit the requested ratios exactly", "[ingest]") {
  Vector w_hat(2);
  w_hat << 1.0, 0.5;

  const auto inst_i = generate_quartic(100, 2, w_hat, NoisePlan::scenario_i(), 7);
  const double signal = inst_i.y_clean.squaredNorm();
  CHECK(inst_i.noise.squaredNorm() / signal == Approx(0.01).epsilon(1e-12));

  const auto inst_ii = generate_quartic(100, 2, w_hat, NoisePlan::scenario_ii(100), 7);
  const double signal_ii = inst_ii.y_clean.squaredNorm();
  double head = 0.0;
  for (int i = 0; i < 40; ++i) head += inst_ii.noise[i] * inst_ii.noise[i];
  CHECK(head / signal_ii == Approx(0.25).epsilon(1e-12));
  CHECK((inst_ii.noise.squaredNorm() - head) / signal_ii == Approx(0.01).epsilon(1e-12));
}

TEST_CASE("zero noise plan reproduces the clean observations", "[ingest]") {
  Vector w_hat(3);
  w_hat << 0.5, -1.0, 2.0;
  const auto inst = generate_quartic(25, 3, w_hat, NoisePlan::none(), 3);
  CHECK(inst.noise.norm() == 0.0);
  CHECK((inst.y - inst.y_clean).norm() == 0.0);
  for (size_t i = 0; i < inst.n(); ++i) {
    const double s = inst.a[i].dot(w_hat);
    CHECK(inst.y[static_cast<Eigen::Index>(i)] == s * s);
  }
}

TEST_CASE("quartic generation validates its inputs", "[ingest]") {
  Vector w_hat(2);
  w_hat << 1.0, 0.5;
  CHECK_THROWS_AS(generate_quartic(0, 2, w_hat, NoisePlan::none(), 1), PreconditionError);
  CHECK_THROWS_AS(generate_quartic(10, 2, Vector::Zero(2), NoisePlan::none(), 1),
                  PreconditionError);
  CHECK_THROWS_AS(generate_quartic(10, 3, w_hat, NoisePlan::none(), 1), PreconditionError);
  CHECK_THROWS_AS(generate_quartic(10, 2, w_hat, NoisePlan{20, 0.25, 0.01}, 1), PreconditionError);
}

TEST_CASE("generators are pure functions of their parameters", "[ingest]") {
  Vector w_hat(2);
  w_hat << 1.0, 0.5;
  const auto a = generate_quartic(50, 2, w_hat, NoisePlan::scenario_i(), 11);
  const auto b = generate_quartic(50, 2, w_hat, NoisePlan::scenario_i(), 11);
  CHECK((a.y - b.y).norm() == 0.0);
  for (size_t i = 0; i < a.n(); ++i) CHECK((a.a[i] - b.a[i]).norm() == 0.0);
  const auto c = generate_quartic(50, 2, w_hat, NoisePlan::scenario_i(), 12);
  CHECK((a.y - c.y).norm() != 0.0);

  LogisticSyntheticParams params{.n = 30, .d = 4, .margin = 2.0, .seed = 9};
  const auto d1 = generate_synthetic_logistic(params);
  const auto d2 = generate_synthetic_logistic(params);
  CHECK(d1.dataset == d2.dataset);
  CHECK(write_libsvm(d1.dataset) == write_libsvm(d2.dataset));
}

TEST_CASE("planted logistic data is separable without flips", "[ingest]") {
  const auto gen = generate_synthetic_logistic({.n = 50, .d = 5, .margin = 1.0, .seed = 1});
  Vector w_plant = gen.w_plant;
  for (const auto& ex : gen.dataset.examples) {
    Vector x = Vector::Zero(5);
    ex.add_scaled_to(1.0, x);
    CHECK(ex.label * x.dot(w_plant) >= 1.0 - 1e-12);
  }
}

TEST_CASE("label flips break separability", "[ingest]") {
  const auto gen = generate_synthetic_logistic(
      {.n = 100, .d = 5, .margin = 1.0, .flip_fraction = 0.2, .seed = 2});
  size_t violations = 0;
  for (const auto& ex : gen.dataset.examples) {
    Vector x = Vector::Zero(5);
    ex.add_scaled_to(1.0, x);
    if (ex.label * x.dot(gen.w_plant) < 0) ++violations;
  }
  CHECK(violations > 0);
}

TEST_CASE("logistic generator validates its inputs", "[ingest]") {
  CHECK_THROWS_AS(generate_synthetic_logistic({.n = 0, .d = 5}), PreconditionError);
  CHECK_THROWS_AS(generate_synthetic_logistic({.n = 5, .d = 0}), PreconditionError);
  CHECK_THROWS_AS(generate_synthetic_logistic({.n = 5, .d = 2, .margin = -1.0}),
                  PreconditionError);
  CHECK_THROWS_AS(generate_synthetic_logistic({.n = 5, .d = 2, .flip_fraction = 1.5}),
                  PreconditionError);
}
