#include <gtest/gtest.h>

#include <filesystem>
#include <string>

#include "dirt/cli/config.hpp"
#include "dirt/common/errors.hpp"

using namespace dirt;

namespace {

std::string error_of(const std::string& text) {
    try {
        (void)parse_config(text, "cfg.yaml");
    } catch (const ConfigError& e) {
        return e.what();
    }
    return "";
}

}  // namespace

TEST(Config, ParsesNestedBlocks) {
    const auto c = parse_config(R"(
problem:
  name: linear
  dim: 25
  alpha: 4.5
method:
  name: dirt
  rank: 3
  betas: [0.01, 0.1, 1]
  gamma: 20
repetitions: 4
seed: 99
jobs: 2
)");
    EXPECT_EQ(c.problem.dim, 25u);
    EXPECT_DOUBLE_EQ(c.problem.alpha, 4.5);
    EXPECT_EQ(c.method.rank, 3u);
    EXPECT_EQ(c.method.betas, (std::vector<double>{0.01, 0.1, 1.0}));
    EXPECT_DOUBLE_EQ(c.method.gamma, 20.0);
    EXPECT_EQ(c.repetitions, 4u);
    EXPECT_EQ(c.seed, 99u);
    EXPECT_EQ(c.jobs, 2u);
}

TEST(Config, RoundTripIsIdempotent) {
    const char* texts[] = {
        "problem: {name: linear, dim: 7, alpha: 2.75}\nmethod: {name: dirt, gamma_grid: [1, 2.5], gamma_max: 50}\n",
        "problem: {name: corroded_beam, update: 2, inner_samples: 500}\nmethod: {name: bus_sus, p0: 0.2}\n",
        "problem: {name: cantilever, terms: 5, noise_std: 0.002}\nmethod: {name: ce, elite_fraction: 0.2}\n",
        "problem: {name: constant, dim: 3, value: -1}\nmethod: {name: mc, samples: 10}\noutput: 'a dir/x'\n",
    };
    for (const char* t : texts) {
        const auto c = parse_config(t);
        const auto once = emit_config(c);
        const auto c2 = parse_config(once);
        EXPECT_EQ(c2, c) << t;
        EXPECT_EQ(emit_config(c2), once) << t;
    }
}

TEST(Config, UnknownKeysReportLine) {
    EXPECT_EQ(error_of("problem:\n  name: linear\n  dimm: 3\n"), "cfg.yaml:3: unknown key 'dimm' in problem 'linear'");
    EXPECT_EQ(error_of("seed: 1\nextra: 2\n"), "cfg.yaml:2: unknown key 'extra' in top level");
    // Keys of another method are rejected, not ignored.
    EXPECT_EQ(error_of("method:\n  name: sus\n  rank: 4\n"), "cfg.yaml:3: unknown key 'rank' in method 'sus'");
    EXPECT_NE(error_of("problem:\n  name: plate\n").find("cfg.yaml:2:"), std::string::npos);
}

TEST(Config, ValuesAreValidatedAtLoad) {
    EXPECT_NE(error_of("problem: {name: linear, dim: 0}\n"), "");
    EXPECT_NE(error_of("problem: {name: linear, dim: -3}\n").find("nonnegative"), std::string::npos);
    EXPECT_NE(error_of("method: {name: dirt, gamma: 0}\n"), "");
    EXPECT_NE(error_of("method: {name: dirt, betas: [0.5, 0.1, 1]}\n"), "");
    EXPECT_NE(error_of("method: {name: dirt, betas: [0.1, 0.5]}\n"), "");
    EXPECT_NE(error_of("method: {name: sus, p0: 0.1234}\n"), "");
    EXPECT_NE(error_of("method: {name: ce, samples_per_level: 10}\n"), "");
    EXPECT_NE(error_of("problem: {name: corroded_beam, update: 3}\n"), "");
    EXPECT_NE(error_of("method: {name: dirt, gamma_grid: [5, 50], gamma_max: 20}\n"), "");
    EXPECT_NE(error_of("repetitions: 0\n"), "");
    EXPECT_NE(error_of("seed: abc\n").find("cfg.yaml:1:"), std::string::npos);
    EXPECT_NE(error_of("problem: [1, 2]\n"), "");
}

TEST(Config, ShippedConfigsLoad) {
    const std::filesystem::path dir = std::filesystem::path(DIRT_SOURCE_DIR) / "configs";
    std::size_t n = 0;
    for (const auto& e : std::filesystem::directory_iterator(dir)) {
        if (e.path().extension() != ".yaml") continue;
        EXPECT_NO_THROW((void)load_config(e.path().string())) << e.path();
        ++n;
    }
    EXPECT_GE(n, 5u);
}

TEST(Config, MissingFileIsConfigError) { EXPECT_THROW((void)load_config("/nonexistent/x.yaml"), ConfigError); }
