// Acceptance gate: every release-level property, one test per check, at the
// stated tolerances. The checks themselves live in qtsim/selftest.hpp and
// are also reachable from the shipped binary via `qtsim selftest`.

#include "qtsim/selftest.hpp"

#include <gtest/gtest.h>

#include <cstdlib>
#include <iostream>
#include <string>

namespace {

std::string cli_binary() {
    const char* path = std::getenv("QTSIM_CLI_BIN");
    return path ? path : "";
}

TEST(Acceptance, BellBasisOrthonormality) {
    EXPECT_TRUE(qtsim::selftest::bell_basis_orthonormal(std::cout));
}

TEST(Acceptance, TeleportExactness) {
    EXPECT_TRUE(qtsim::selftest::teleport_exactness(std::cout));
}

TEST(Acceptance, MeasurementUniformity) {
    EXPECT_TRUE(qtsim::selftest::measurement_uniformity(std::cout));
}

TEST(Acceptance, NoSignaling) {
    EXPECT_TRUE(qtsim::selftest::no_signaling(std::cout));
}

TEST(Acceptance, ScissorsHeraldLaw) {
    EXPECT_TRUE(qtsim::selftest::scissors_herald_law(std::cout));
}

TEST(Acceptance, ScissorsTruncation) {
    EXPECT_TRUE(qtsim::selftest::scissors_truncation(std::cout));
}

TEST(Acceptance, SwapEntanglement) {
    EXPECT_TRUE(qtsim::selftest::swap_entanglement(std::cout));
}

TEST(Acceptance, CavityProtocol) {
    EXPECT_TRUE(qtsim::selftest::cavity_protocol(std::cout));
}

TEST(Acceptance, OracleCrossChecks) {
    EXPECT_TRUE(qtsim::selftest::oracle_cross_checks(std::cout));
}

TEST(Acceptance, CliDeterminism) {
    const std::string bin = cli_binary();
    ASSERT_FALSE(bin.empty())
        << "QTSIM_CLI_BIN must point at the qtsim binary";
    EXPECT_TRUE(qtsim::selftest::cli_determinism(bin, std::cout));
}

}  // namespace
