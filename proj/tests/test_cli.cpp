#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "holonom/cli.hpp"
#include "holonom/io.hpp"
#include "oracles.hpp"

namespace holonom {
namespace {

namespace fs = std::filesystem;
constexpr double kPi = std::numbers::pi;

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("holonom_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string write(const std::string& name, const Json& j) {
    const std::string p = (dir_ / name).string();
    std::ofstream(p) << j.dump(2);
    return p;
  }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  fs::path dir_;
};

ControlProblem pauli_problem() {
  return ControlProblem(HermitianMatrix(0.5 * oracle::sigma_z()), HermitianMatrix(oracle::sigma_z()),
                        HermitianMatrix(oracle::sigma_x()));
}

ControlProblem gue_timing4() {
  return timing_problem(sample_gue(4, 1.0, derive_seed(42, 1)), sample_gue(4, 1.0, derive_seed(42, 2)));
}

ControlProblem gue_amplitude4() {
  return ControlProblem(sample_gue(4, 0.5, derive_seed(42, 3)), sample_gue(4, 1.0, derive_seed(42, 1)),
                        sample_gue(4, 1.0, derive_seed(42, 2)), ControlMode::AmplitudeControl, 1.0 / 16.0);
}

TEST_F(CliTest, CheckExitCodes) {
  const Outcome ok = run({"check", write("pauli.json", problem_to_json(pauli_problem()))});
  EXPECT_EQ(ok.code, 0);
  EXPECT_GE(Json::parse(ok.out).at("algebra_dim").get<int>(), 3);

  RealVector a(3), b(3);
  a << 1.0, 2.0, 4.0;
  b << -1.0, 0.5, 3.0;
  const Outcome diag = run({"check", write("diag.json", problem_to_json(timing_problem(
                                                           HermitianMatrix::diagonal(a),
                                                           HermitianMatrix::diagonal(b))))});
  EXPECT_EQ(diag.code, 1);
  EXPECT_LE(Json::parse(diag.out).at("algebra_dim").get<int>(), 3);

  Json broken = problem_to_json(pauli_problem());
  broken["h0"]["re"].erase(1);
  const Outcome bad = run({"check", write("broken.json", broken)});
  EXPECT_EQ(bad.code, 2);
  EXPECT_NE(bad.err.find("h0"), std::string::npos);

  EXPECT_EQ(run({"check", path("missing.json")}).code, 2);
  EXPECT_EQ(run({"frobnicate"}).code, 2);
}

TEST_F(CliTest, SeedFromGridStart) {
  RealVector d1(2), d2(2);
  d1 << 0.0, 1.0;
  d2 << 0.0, 2.0;
  const ComplexMatrix ha = ComplexMatrix(d1.cast<Complex>().asDiagonal()) + oracle::sigma_x();
  const ComplexMatrix hb = ComplexMatrix(d2.cast<Complex>().asDiagonal()) + oracle::sigma_x();
  // For 2x2 unitaries F_2 = 2 + |tr U|^2; grid-minimize |tr U|.
  double best = 1e300;
  std::vector<double> arg;
  for (int i = 0; i < 100; ++i) {
    for (int j = 0; j < 100; ++j) {
      const double t1 = 2 * kPi * i / 100;
      const double t2 = 2 * kPi * j / 100;
      const double tr =
          std::abs((oracle::series_evolution(hb, t2) * oracle::series_evolution(ha, t1)).trace());
      if (tr < best) {
        best = tr;
        arg = {t1, t2};
      }
    }
  }
  const std::string prob = write("p.json", problem_to_json(timing_problem(HermitianMatrix(ha), HermitianMatrix(hb))));
  const std::string start = write("start.json", Json{{"values", arg}});
  const Outcome o = run({"seed", prob, "--starts", "1", "--start", start, "--seed", "1"});
  EXPECT_EQ(o.code, 0) << o.err;
  const Json j = Json::parse(o.out);
  EXPECT_EQ(j.at("start_index"), 0);
  EXPECT_TRUE(j.at("seed").at("converged").get<bool>());
  EXPECT_LE(j.at("seed").at("achieved_fn").get<double>(), 2.0 + 1e-9);

  EXPECT_EQ(run({"seed", prob, "--starts", "0", "--seed", "1"}).code, 2);
}

TEST_F(CliTest, SeedReportsBasinFraction) {
  const Outcome o = run({"seed", write("p.json", problem_to_json(gue_timing4())), "--starts", "100",
                         "--seed", "42", "--threads", "1"});
  EXPECT_EQ(o.code, 0);
  const Json j = Json::parse(o.out);
  EXPECT_EQ(j.at("attempted"), 100);
  EXPECT_GE(j.at("success_fraction").get<double>(), 0.15);
}

TEST_F(CliTest, SynthIdentityTarget) {
  const std::string prob = write("p.json", problem_to_json(pauli_problem()));
  const std::string target = write("t.json", Json{{"unitary", matrix_to_json(ComplexMatrix::Identity(2, 2))}});
  const Outcome o = run({"synth", prob, target, "--seed", "5", "--starts", "20"});
  ASSERT_EQ(o.code, 0) << o.err;
  const ResultFile r = result_from_json(Json::parse(o.out));
  EXPECT_EQ(r.n_star, 1);
  EXPECT_LE(r.final_error, 1e-8);
  EXPECT_EQ(r.sequence.pulses.size(), 4u);
  EXPECT_EQ(r.master_seed, 5u);
}

TEST_F(CliTest, SynthVerifyRoundTripAndTampering) {
  for (const ControlProblem& p : {gue_timing4(), gue_amplitude4()}) {
    const std::string prob = write("p.json", problem_to_json(p));
    const UnitaryMatrix u = sample_haar_unitary(4, derive_seed(99, 0));
    const std::string target = write("t.json", target_to_json(unitary_target(u)));
    const std::string out = path("r.json");
    const Outcome s = run({"synth", prob, target, "-o", out, "--seed", "42", "--starts", "30", "--threads", "1"});
    ASSERT_EQ(s.code, 0) << s.err;
    const ResultFile r = result_from_json(read_json_file(out));
    EXPECT_GE(r.n_star, 1);
    EXPECT_LT(r.final_error, 1e-6);
    EXPECT_EQ(r.acceptance_tol, r.n_star * r.tol);

    const Outcome v = run({"verify", prob, out, target});
    EXPECT_EQ(v.code, 0) << v.err;
    EXPECT_NEAR(Json::parse(v.out).at("error").get<double>(), r.final_error, 1e-10);

    Json tampered = read_json_file(out);
    tampered["pulses"][0]["parameter"] = tampered["pulses"][0]["parameter"].get<double>() + 0.1;
    const Outcome t = run({"verify", prob, write("tampered.json", tampered), target});
    EXPECT_EQ(t.code, 1);
    EXPECT_GT(Json::parse(t.out).at("error").get<double>(), r.acceptance_tol);

    const std::string other = write("other.json", problem_to_json(pauli_problem()));
    EXPECT_EQ(run({"verify", other, out, target}).code, 2);
  }
}

TEST_F(CliTest, SynthIsReproducible) {
  const std::string prob = write("p.json", problem_to_json(gue_timing4()));
  const std::string target =
      write("t.json", target_to_json(unitary_target(sample_haar_unitary(4, derive_seed(99, 1)))));
  ASSERT_EQ(run({"synth", prob, target, "-o", path("a.json"), "--seed", "7", "--starts", "20"}).code, 0);
  ASSERT_EQ(run({"synth", prob, target, "-o", path("b.json"), "--seed", "7", "--starts", "20", "--threads", "1"}).code, 0);
  std::ifstream a(path("a.json")), b(path("b.json"));
  const std::string sa((std::istreambuf_iterator<char>(a)), {});
  const std::string sb((std::istreambuf_iterator<char>(b)), {});
  EXPECT_EQ(sa, sb);
}

TEST_F(CliTest, SynthRejectsUncontrollable) {
  RealVector a(2), b(2);
  a << 1.0, 2.0;
  b << 0.5, -1.0;
  const std::string prob = write("p.json", problem_to_json(timing_problem(HermitianMatrix::diagonal(a),
                                                                          HermitianMatrix::diagonal(b))));
  const std::string target = write("t.json", target_to_json(unitary_target(sample_haar_unitary(2, 3))));
  EXPECT_EQ(run({"synth", prob, target, "--seed", "1"}).code, 1);
  EXPECT_EQ(run({"synth", prob, target, "--seed", "1", "--tol", "0"}).code, 2);
}

TEST_F(CliTest, SpectrumProductRootIsEquallySpaced) {
  const std::string prob = write("p.json", problem_to_json(timing_problem(HermitianMatrix(oracle::sigma_z()),
                                                                          HermitianMatrix(oracle::sigma_x()))));
  const std::string params = write("s.json", Json{{"values", {kPi / 2, 0.0}}});
  const Outcome o = run({"spectrum", "--source", "product", "--problem", prob, "--params", params,
                         "--samples", "3", "--seed", "1"});
  ASSERT_EQ(o.code, 0) << o.err;
  const auto pos = o.out.find("# spacing_variance=");
  ASSERT_NE(pos, std::string::npos);
  EXPECT_LT(std::stod(o.out.substr(pos + 19)), 1e-28);
  EXPECT_NE(o.out.find("index,phase,source\n"), std::string::npos);
}

TEST_F(CliTest, SpectrumHaarVersusPoisson) {
  auto variance = [](const std::string& text) {
    return std::stod(text.substr(text.find("# spacing_variance=") + 19));
  };
  const Outcome h = run({"spectrum", "--source", "haar", "--dim", "16", "--samples", "1000", "--seed", "9"});
  const Outcome p = run({"spectrum", "--source", "poisson", "--dim", "16", "--samples", "1000", "--seed", "9"});
  ASSERT_EQ(h.code, 0);
  ASSERT_EQ(p.code, 0);
  EXPECT_LT(variance(h.out) / variance(p.out), 0.5);
}

TEST_F(CliTest, SpectrumUsageErrors) {
  EXPECT_EQ(run({"spectrum", "--samples", "0", "--seed", "1"}).code, 2);
  EXPECT_EQ(run({"spectrum", "--source", "gaussian", "--seed", "1"}).code, 2);
  EXPECT_EQ(run({"spectrum", "--params", "x.json", "--seed", "1"}).code, 2);
}

TEST_F(CliTest, CiModeRequiresSeed) {
  ::setenv("HOLONOM_CI", "1", 1);
  const Outcome o = run({"spectrum", "--samples", "2"});
  ::unsetenv("HOLONOM_CI");
  EXPECT_EQ(o.code, 2);
  EXPECT_NE(o.err.find("--seed"), std::string::npos);
  EXPECT_EQ(run({"spectrum", "--samples", "2"}).code, 0);
}

}  // namespace
}  // namespace holonom
