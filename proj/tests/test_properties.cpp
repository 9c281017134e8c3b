#include <gtest/gtest.h>

#include <stdexcept>

#include "tes/properties.hpp"

namespace tes {
namespace {

// -- pcm_temperature ----------------------------------------------------------

TEST(PcmTemperature, SolidBranch) {
  PcmProperties p;
  EXPECT_NEAR(pcm_temperature(-21.1, p), -10.0, 1e-12);
  EXPECT_NEAR(pcm_temperature(-37.98, p), -18.0, 1e-12);
}

TEST(PcmTemperature, MixturePlateau) {
  PcmProperties p;
  EXPECT_DOUBLE_EQ(pcm_temperature(0.0, p), 0.0);
  EXPECT_DOUBLE_EQ(pcm_temperature(0.5 * p.latent_heat, p), 0.0);
  EXPECT_DOUBLE_EQ(pcm_temperature(p.latent_heat, p), 0.0);
}

TEST(PcmTemperature, LiquidBranch) {
  PcmProperties p;
  EXPECT_NEAR(pcm_temperature(375.8, p), 10.0, 1e-12);
  EXPECT_NEAR(pcm_temperature(409.24, p), 18.0, 1e-12);
}

TEST(PcmTemperature, MonotoneAndContinuous) {
  PcmProperties p;
  double prev = pcm_temperature(-50.0, p);
  for (double h = -49.0; h <= 400.0; h += 1.0) {
    const double t = pcm_temperature(h, p);
    EXPECT_GE(t, prev) << "h = " << h;
    prev = t;
  }
  const double eps = 1e-9;
  EXPECT_NEAR(pcm_temperature(-eps, p), pcm_temperature(0.0, p), 1e-9);
  EXPECT_NEAR(pcm_temperature(p.latent_heat + eps, p), pcm_temperature(p.latent_heat, p), 1e-9);
}

TEST(PcmTemperature, ShiftedSaturation) {
  PcmProperties p;
  p.t_sat = 5.0;
  EXPECT_DOUBLE_EQ(pcm_temperature(100.0, p), 5.0);
  EXPECT_NEAR(pcm_temperature(-2.11, p), 4.0, 1e-12);
  EXPECT_NEAR(pcm_temperature(p.latent_heat + 4.18, p), 6.0, 1e-12);
}

// -- phase classification -----------------------------------------------------

TEST(PcmPhase, FromTemperature) {
  PcmProperties p;
  EXPECT_EQ(pcm_phase(-1.0, p), Phase::Solid);
  EXPECT_EQ(pcm_phase(0.0, p), Phase::Liquid);  // at saturation: liquid
  EXPECT_EQ(pcm_phase(1.0, p), Phase::Liquid);
}

TEST(PcmPhase, FromEnthalpyHalfLatentSplit) {
  PcmProperties p;
  EXPECT_EQ(pcm_phase_from_enthalpy(-1.0, p), Phase::Solid);
  EXPECT_EQ(pcm_phase_from_enthalpy(0.49 * p.latent_heat, p), Phase::Solid);
  EXPECT_EQ(pcm_phase_from_enthalpy(0.5 * p.latent_heat, p), Phase::Liquid);
  EXPECT_EQ(pcm_phase_from_enthalpy(400.0, p), Phase::Liquid);
}

// -- pcm_enthalpy -------------------------------------------------------------

TEST(PcmEnthalpy, ReferencePoints) {
  PcmProperties p;
  EXPECT_DOUBLE_EQ(pcm_enthalpy(0.0, Phase::Solid, p), 0.0);
  EXPECT_DOUBLE_EQ(pcm_enthalpy(0.0, Phase::Liquid, p), p.latent_heat);
  EXPECT_NEAR(pcm_enthalpy(18.0, Phase::Liquid, p), 409.24, 1e-12);
  EXPECT_NEAR(pcm_enthalpy(-18.0, Phase::Solid, p), -37.98, 1e-12);
}

TEST(PcmEnthalpy, InconsistentPhaseThrows) {
  PcmProperties p;
  EXPECT_THROW(pcm_enthalpy(1.0, Phase::Solid, p), std::invalid_argument);
  EXPECT_THROW(pcm_enthalpy(-1.0, Phase::Liquid, p), std::invalid_argument);
}

TEST(PcmEnthalpy, RoundTripThroughTemperature) {
  PcmProperties p;
  for (double t = -40.0; t <= -0.25; t += 0.25)
    EXPECT_NEAR(pcm_temperature(pcm_enthalpy(t, Phase::Solid, p), p), t, 1e-12 * std::abs(t));
  for (double t = 0.25; t <= 40.0; t += 0.25)
    EXPECT_NEAR(pcm_temperature(pcm_enthalpy(t, Phase::Liquid, p), p), t, 1e-12 * std::abs(t));
}

TEST(PcmEnthalpy, PhaseConsistency) {
  PcmProperties p;
  for (double t = -30.0; t < 0.0; t += 0.5)
    EXPECT_EQ(pcm_phase(pcm_temperature(pcm_enthalpy(t, Phase::Solid, p), p), p), Phase::Solid);
}

// -- single-phase relations ---------------------------------------------------

TEST(SinglePhase, LinearRelations) {
  EXPECT_DOUBLE_EQ(single_phase_temperature(0.0, 3.4), 0.0);
  EXPECT_NEAR(single_phase_temperature(61.2, 3.4), 18.0, 1e-12);
  EXPECT_NEAR(single_phase_temperature(-7.02, 0.39), -18.0, 1e-12);
  EXPECT_NEAR(single_phase_enthalpy(18.0, 3.4), 61.2, 1e-12);
}

// -- validation ---------------------------------------------------------------

TEST(PropertyValidation, PcmRejectsNonPositive) {
  PcmProperties p;
  p.latent_heat = 0.0;
  EXPECT_THROW(p.validate(), std::invalid_argument);
  p = {};
  p.k_liquid = -1.0;
  EXPECT_THROW(p.validate(), std::invalid_argument);
  p = {};
  EXPECT_NO_THROW(p.validate());
}

TEST(PropertyValidation, MaterialsRequireRoleFields) {
  TesMaterials m;
  EXPECT_NO_THROW(m.validate());
  m.working_fluid.h_conv = {};
  EXPECT_THROW(m.validate(), std::invalid_argument);
  m = {};
  m.inner_wall.k = 0.0;
  EXPECT_THROW(m.validate(), std::invalid_argument);
  m = {};
  m.insulation_resistance = -1.0;
  EXPECT_THROW(m.validate(), std::invalid_argument);
  m = {};
  m.insulation_resistance = 0.0;  // bare pipe is allowed
  EXPECT_NO_THROW(m.validate());
}

TEST(PropertyValidation, RequiredPropertyMessageNamesField) {
  MaterialProperties m;
  try {
    required_property(m.cp, "cp", "working_fluid");
    FAIL() << "expected throw";
  } catch (const std::invalid_argument& e) {
    EXPECT_NE(std::string(e.what()).find("working_fluid"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("cp"), std::string::npos);
  }
}

}  // namespace
}  // namespace tes
