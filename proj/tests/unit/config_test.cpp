#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <fstream>

#include "sarsim/config.hpp"

using namespace sarsim;

TEST_CASE("default config is valid and carries the documented knobs") {
    const RunConfig cfg = default_config();
    REQUIRE_NOTHROW(validate_config(cfg));

    CHECK(cfg.uav_count == 3);
    CHECK(cfg.field.width_m == 90.0);
    CHECK(cfg.field.height_m == 60.0);
    CHECK(cfg.objects.per_partition == 2);
    CHECK(cfg.objects.mass_g == 135.0);
    CHECK(cfg.gripper.success_prob_pick == 0.97);
    CHECK(cfg.gripper.max_lift_g == 760.0);
    CHECK(cfg.picking.alpha == 0.2);
    CHECK(cfg.picking.cone.apex_altitude == 0.5);
    CHECK(cfg.picking.cone.top_altitude == 8.0);
    CHECK(cfg.calibration.a == 0.0018037);
    CHECK(cfg.calibration.b == 0.3124266);
    CHECK(cfg.calibration.units_to_meters == 0.01);
    CHECK(cfg.picking.stand_height_m == cfg.objects.stand_height_m);
    CHECK(cfg.comms.message_id == 222);
    CHECK(cfg.sim.dt_s == 0.05);
}

TEST_CASE("serialize then parse round-trips every field") {
    RunConfig cfg = default_config();
    cfg.uav_count = 5;
    cfg.field.width_m = 120.0;
    cfg.field.partition_mode = PartitionMode::Trapezoid;
    cfg.field.trapezoid_skew = 0.25;
    cfg.objects.colors = {"blue"};
    cfg.objects.stand_height_m = 0.4;
    cfg.sensors.pixel_noise_px = 0.0;
    cfg.gripper.success_prob_pick = 0.53;
    cfg.comms.loss_prob = 0.3;
    cfg.comms.latency_s = 0.2;
    cfg.picking.max_recover_episodes = 7;
    cfg.picking.cone.top_radius = 1.25;
    cfg.calibration.h_c = 4.0;
    cfg.scan.lane_spacing_m = 3.5;
    cfg.sim.time_budget_s = 900.0;

    const std::string text = config_to_json_text(cfg);
    const RunConfig back = config_from_json_text(text);

    CHECK(back.uav_count == cfg.uav_count);
    CHECK(back.field.width_m == cfg.field.width_m);
    CHECK(back.field.partition_mode == PartitionMode::Trapezoid);
    CHECK(back.field.trapezoid_skew == cfg.field.trapezoid_skew);
    CHECK(back.objects.colors == cfg.objects.colors);
    CHECK(back.objects.stand_height_m == 0.4);
    CHECK(back.picking.stand_height_m == 0.4);
    CHECK(back.sensors.pixel_noise_px == 0.0);
    CHECK(back.gripper.success_prob_pick == 0.53);
    CHECK(back.comms.loss_prob == 0.3);
    CHECK(back.comms.latency_s == 0.2);
    CHECK(back.picking.max_recover_episodes == 7);
    CHECK(back.picking.cone.top_radius == 1.25);
    CHECK(back.calibration.h_c == 4.0);
    CHECK(back.scan.lane_spacing_m == 3.5);
    CHECK(back.sim.time_budget_s == 900.0);

    CHECK(config_to_json_text(back) == text);
}

TEST_CASE("partial configs keep defaults for everything unmentioned") {
    const RunConfig cfg = config_from_json_text(R"({"uav_count": 4})");
    CHECK(cfg.uav_count == 4);
    CHECK(cfg.field.width_m == 90.0);
    CHECK(cfg.gripper.success_prob_pick == 0.97);
}

TEST_CASE("unknown keys are rejected with a dotted path") {
    SECTION("top level") {
        REQUIRE_THROWS_MATCHES(
            config_from_json_text(R"({"uav_cuont": 4})", "cfg.json"), ConfigError,
            Catch::Matchers::MessageMatches(
                Catch::Matchers::ContainsSubstring("cfg.json.uav_cuont")));
    }
    SECTION("nested") {
        REQUIRE_THROWS_MATCHES(
            config_from_json_text(R"({"gripper": {"pick_prob": 0.5}})", "cfg.json"),
            ConfigError,
            Catch::Matchers::MessageMatches(
                Catch::Matchers::ContainsSubstring("cfg.json.gripper.pick_prob")));
    }
    SECTION("deeply nested") {
        REQUIRE_THROWS_MATCHES(
            config_from_json_text(R"({"picking": {"cone": {"apex": 0.5}}})", "cfg.json"),
            ConfigError,
            Catch::Matchers::MessageMatches(
                Catch::Matchers::ContainsSubstring("cfg.json.picking.cone.apex")));
    }
}

TEST_CASE("type mismatches name the offending key") {
    REQUIRE_THROWS_MATCHES(
        config_from_json_text(R"({"sim": {"dt_s": "fast"}})", "cfg.json"), ConfigError,
        Catch::Matchers::MessageMatches(
            Catch::Matchers::ContainsSubstring("cfg.json.sim.dt_s")));
    REQUIRE_THROWS_MATCHES(
        config_from_json_text(R"({"field": {"drop_zone": {"min": [1]}}})", "cfg.json"),
        ConfigError,
        Catch::Matchers::MessageMatches(
            Catch::Matchers::ContainsSubstring("cfg.json.field.drop_zone.min")));
}

TEST_CASE("malformed JSON is a config error naming the source") {
    REQUIRE_THROWS_MATCHES(
        config_from_json_text("{not json", "broken.json"), ConfigError,
        Catch::Matchers::MessageMatches(Catch::Matchers::ContainsSubstring("broken.json")));
}

TEST_CASE("validation failures") {
    SECTION("mass above the lift class") {
        RunConfig cfg = default_config();
        cfg.objects.mass_g = 600.0;
        REQUIRE_THROWS_AS(validate_config(cfg), ConfigError);
    }
    SECTION("out-of-range probability") {
        RunConfig cfg = default_config();
        cfg.gripper.success_prob_pick = 1.2;
        REQUIRE_THROWS_AS(validate_config(cfg), ConfigError);
    }
    SECTION("bad partition mode string") {
        REQUIRE_THROWS_AS(
            config_from_json_text(R"({"field": {"partition_mode": "spiral"}})"), ConfigError);
    }
    SECTION("inverted drop zone") {
        RunConfig cfg = default_config();
        cfg.field.drop_zone_min = {53.0, 15.0};
        cfg.field.drop_zone_max = {37.0, 5.0};
        REQUIRE_THROWS_AS(validate_config(cfg), ConfigError);
    }
    SECTION("drop zone not strictly inside the field") {
        RunConfig cfg = default_config();
        cfg.field.drop_zone_max = {95.0, 15.0};
        REQUIRE_THROWS_MATCHES(
            validate_config(cfg), ConfigError,
            Catch::Matchers::MessageMatches(Catch::Matchers::ContainsSubstring("field:")));
    }
    SECTION("degenerate cone") {
        RunConfig cfg = default_config();
        cfg.picking.cone.top_altitude = 0.1;
        REQUIRE_THROWS_MATCHES(
            validate_config(cfg), ConfigError,
            Catch::Matchers::MessageMatches(
                Catch::Matchers::ContainsSubstring("picking.cone")));
    }
    SECTION("oversized time step") {
        RunConfig cfg = default_config();
        cfg.sim.dt_s = 0.5;
        REQUIRE_THROWS_AS(validate_config(cfg), ConfigError);
    }
    SECTION("zero uavs") {
        RunConfig cfg = default_config();
        cfg.uav_count = 0;
        REQUIRE_THROWS_AS(validate_config(cfg), ConfigError);
    }
    SECTION("unknown transport") {
        RunConfig cfg = default_config();
        cfg.comms.transport = "carrier-pigeon";
        REQUIRE_THROWS_AS(validate_config(cfg), ConfigError);
    }
}

TEST_CASE("file loading") {
    SECTION("missing file") {
        REQUIRE_THROWS_AS(load_config_file("/nonexistent/sarsim.json"), ConfigError);
    }
    SECTION("round-trip through disk") {
        const std::string path = "config_test_roundtrip.json";
        {
            std::ofstream out(path);
            out << config_to_json_text(default_config());
        }
        const RunConfig cfg = load_config_file(path);
        CHECK(cfg.uav_count == 3);
        std::remove(path.c_str());
    }
}

TEST_CASE("field map params mirror the field block") {
    RunConfig cfg = default_config();
    cfg.uav_count = 4;
    const FieldMapParams p = field_map_params(cfg);
    CHECK(p.uav_count == 4);
    CHECK(p.search_area.area() == Catch::Approx(90.0 * 60.0));
    CHECK(p.drop_zone.area() == Catch::Approx(16.0 * 10.0));
    CHECK(p.origin.lat_deg == cfg.field.origin.lat_deg);
    REQUIRE_NOTHROW(build_field_map(p));
}
