#include "slarev/config.hpp"

#include <gtest/gtest.h>

#include <string>

using namespace slarev;

namespace {

std::string config_path(const std::string& name) { return std::string(SLAREV_CONFIG_DIR) + "/" + name; }

const char* kMinimal = R"({
  "room": {"dimensions": [10, 8, 4], "absorption": 0.5},
  "placement": {"sla": [2, 2, 2], "sma": [6, 5, 2]}
})";

std::string with(const std::string& extra) {
  std::string s = kMinimal;
  s.insert(s.rfind('}'), "," + extra);
  return s;
}

void expect_config_error(const std::string& text, const std::string& fragment) {
  try {
    parse_config(text);
    FAIL() << "accepted: " << text;
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find(fragment), std::string::npos) << e.what();
  }
}

}  // namespace

TEST(BundledConfigs, Room1) {
  const ExperimentConfig cfg = load_config(config_path("room1.json"));
  EXPECT_EQ(cfg.name, "room1");
  EXPECT_EQ(cfg.absorptions, (std::vector<double>{0.5, 0.8}));
  EXPECT_EQ(cfg.sla.sh_order, 4);
  EXPECT_EQ(cfg.sma.sh_order, 5);
  EXPECT_DOUBLE_EQ(cfg.sla.radius, 0.20);
  EXPECT_DOUBLE_EQ(cfg.sma.radius, 0.12);
  EXPECT_EQ(cfg.cells.size(), 19u);
  EXPECT_EQ(cfg.snr_sweep_db, (std::vector<double>{40, 30, 20}));
  EXPECT_EQ(cfg.noise.realizations, 20);
  EXPECT_NEAR(cfg.room_with(0.5).sabine_rt(), 1.14, 0.005);
  EXPECT_EQ(cfg.case_name(0.5), "room1_a0.50");
  // Image horizon covers 1.5 x the Sabine time, and the grid holds it.
  EXPECT_GE(cfg.image_max_time(0.5), 1.5 * 1.139);
  EXPECT_GE(cfg.grid.duration(), cfg.image_max_time(0.5));
}

TEST(BundledConfigs, Room2AndFreeField) {
  const ExperimentConfig r2 = load_config(config_path("room2.json"));
  EXPECT_NEAR(r2.room_with(0.4).sabine_rt(), 0.80, 0.01);
  EXPECT_NEAR(r2.room_with(0.7).sabine_rt(), 0.46, 0.01);
  const ExperimentConfig ff = load_config(config_path("free_field.json"));
  EXPECT_EQ(ff.absorptions, (std::vector<double>{1.0}));
  ASSERT_TRUE(ff.max_time.has_value());
}

TEST(Profiles, DeskAndPaper) {
  ExperimentConfig cfg = load_config(config_path("room1.json"));
  apply_profile(cfg, "desk");
  EXPECT_EQ(cfg.grid.sample_rate, 16000.0);
  EXPECT_EQ(cfg.grid.fft_length, 1 << 15);
  EXPECT_EQ(cfg.noise.realizations, 10);
  apply_profile(cfg, "paper");
  EXPECT_EQ(cfg.grid.sample_rate, 48000.0);
  EXPECT_EQ(cfg.grid.fft_length, 1 << 17);
  EXPECT_EQ(cfg.noise.realizations, 20);
  EXPECT_THROW(apply_profile(cfg, "laptop"), ConfigError);
}

TEST(Cells, StandardGrid) {
  const auto cells = standard_cells({2, 3, 4});
  ASSERT_EQ(cells.size(), 19u);
  EXPECT_EQ(cells[0].stem(), "omni");
  EXPECT_EQ(cells[1].stem(), "maxFIX_N2");
  EXPECT_EQ(cells.back().stem(), "minC50_N4");
  for (const char* label : {"omni", "maxFIX", "minFIX", "maxDRR", "minDRR", "maxC50", "minC50"})
    EXPECT_EQ(to_string(design_kind_from_string(label)), label);
  EXPECT_THROW(design_kind_from_string("maxSTI"), ConfigError);
}

TEST(Parsing, MinimalConfigUsesDefaults) {
  const ExperimentConfig cfg = parse_config(kMinimal);
  EXPECT_EQ(cfg.grid.sample_rate, 48000.0);
  EXPECT_EQ(cfg.regularization.snr_db, 40.0);
  EXPECT_EQ(cfg.noise.snr_db, 30.0);
  EXPECT_EQ(cfg.cells.size(), 19u);
  EXPECT_EQ(cfg.snr_sweep_db, (std::vector<double>{30.0}));
}

TEST(Parsing, ExplicitCellsAndNoiseOptions) {
  const ExperimentConfig cfg = parse_config(with(R"("cells": [{"label": "omni"}, {"label": "maxC50", "order": 3}],
      "noise": {"snr_db": null, "domain": "physical", "seed": 99})"));
  ASSERT_EQ(cfg.cells.size(), 2u);
  EXPECT_EQ(cfg.cells[1].stem(), "maxC50_N3");
  EXPECT_FALSE(cfg.noise.enabled());
  EXPECT_EQ(cfg.noise.domain, NoiseDomain::Physical);
  EXPECT_EQ(cfg.noise.seed, 99u);
}

TEST(Parsing, SchemaErrorsArePathQualified) {
  expect_config_error("{not json", "not valid JSON");
  expect_config_error(with(R"("colour": 3)"), "unknown key 'colour'");
  expect_config_error(with(R"("grid": {"fs": 16000})"), "grid: unknown key 'fs'");
  expect_config_error(R"({"placement": {"sla": [1,1,1], "sma": [2,2,2]}})", "config.room");
  expect_config_error(with(R"("sla": {"radius": "big"})"), "sla.radius");
  expect_config_error(R"({"room": {"dimensions": [10, 8], "absorption": 0.5},
                          "placement": {"sla": [2,2,2], "sma": [6,5,2]}})", "room.dimensions");
  expect_config_error(with(R"("orders": [2, 5])"), "exceeds the SLA order");
  expect_config_error(with(R"("orders": [2], "cells": [])"), "either");
  expect_config_error(with(R"("noise": {"domain": "acoustic"})"), "noise.domain");
  expect_config_error(with(R"("noise": {"realizations": 0})"), "realizations");
  expect_config_error(with(R"("pwd": {"frequency": 100})"), "pwd.frequency");
  expect_config_error(with(R"("grid": {"fft_length": 1000})"), "power of two");
  expect_config_error(with(R"("grid": {"sample_rate": 16000, "fft_length": 4096})"), "horizon");
}

TEST(Parsing, PhysicalConstraints) {
  expect_config_error(R"({"room": {"dimensions": [10, 8, 4], "absorption": 0.0},
                          "placement": {"sla": [2,2,2], "sma": [6,5,2]}})", "absorption");
  expect_config_error(R"({"room": {"dimensions": [10, 8, 4], "absorption": 0.5},
                          "placement": {"sla": [2,2,2], "sma": [16,5,2]}})", "outside the room");
  expect_config_error(R"({"room": {"dimensions": [10, 8, 4], "absorption": 0.5},
                          "placement": {"sla": [2,2,2], "sma": [2,2,2]}})", "coincident");
  EXPECT_THROW(load_config(config_path("missing.json")), ConfigError);
}
