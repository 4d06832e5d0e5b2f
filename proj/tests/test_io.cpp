#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <string>
#include <vector>

#include "actsched/documents.hpp"
#include "actsched/io.hpp"
#include "fixtures.hpp"

using namespace actsched;
using Catch::Approx;
using fixtures::seg;

namespace {

struct TempDir {
  std::filesystem::path path;
  TempDir() {
    std::string tmpl = (std::filesystem::temp_directory_path() / "actsched-io-XXXXXX").string();
    path = mkdtemp(tmpl.data());
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path, ec);
  }
  std::string file(const char* name) const { return (path / name).string(); }
};

}  // namespace

TEST_CASE("csv parser handles quoting edge cases") {
  SECTION("plain rows") {
    const auto rows = parse_csv("a,b,c\n1,2,3\n");
    REQUIRE(rows.size() == 2);
    CHECK(rows[0] == std::vector<std::string>{"a", "b", "c"});
    CHECK(rows[1] == std::vector<std::string>{"1", "2", "3"});
  }
  SECTION("quoted commas and escaped quotes") {
    const auto rows = parse_csv("name,quote\n\"Doe, Jane\",\"she said \"\"hi\"\"\"\n");
    REQUIRE(rows.size() == 2);
    CHECK(rows[1][0] == "Doe, Jane");
    CHECK(rows[1][1] == "she said \"hi\"");
  }
  SECTION("embedded newline inside quotes") {
    const auto rows = parse_csv("a,b\n\"line1\nline2\",x\n");
    REQUIRE(rows.size() == 2);
    CHECK(rows[1][0] == "line1\nline2");
  }
  SECTION("CRLF line endings") {
    const auto rows = parse_csv("a,b\r\n1,2\r\n");
    REQUIRE(rows.size() == 2);
    CHECK(rows[1] == std::vector<std::string>{"1", "2"});
  }
  SECTION("no trailing newline") {
    const auto rows = parse_csv("a,b\n1,2");
    REQUIRE(rows.size() == 2);
    CHECK(rows[1][1] == "2");
  }
  SECTION("trailing comma means a trailing empty field") {
    const auto rows = parse_csv("a,b,\n");
    REQUIRE(rows.size() == 1);
    CHECK(rows[0] == std::vector<std::string>{"a", "b", ""});
  }
  SECTION("unterminated quote is an error") {
    CHECK_THROWS_AS(parse_csv("a,\"broken\n"), IoError);
  }
  SECTION("empty text") { CHECK(parse_csv("").empty()); }
}

TEST_CASE("header keys normalize to snake_case") {
  CHECK(normalize_key("R_AGE") == "r_age");
  CHECK(normalize_key(" Work State ") == "work_state");
  CHECK(normalize_key("distance-to-work (miles)") == "distance_to_work_miles");
  CHECK(normalize_key("Person ID") == "person_id");
  CHECK(normalize_key("___") == "");
}

TEST_CASE("profiles load from survey-coded CSV headers") {
  const std::string csv =
      "HOUSEID,PERSONID,R_AGE,R_SEX,WKFTPT,PRMACT,OCCAT,WRK_HOME,DRIVER,DISTTOWK17,WRKSTATE\n"
      "h1,p42,30-39,Female,employed full-time,working,professional,No,Yes,4.15,California\n"
      "h1,p43,65+,Male,retired,retired or homemaker,,No,Yes,-9,\n";
  const auto records = profile_records_from_text(csv);
  REQUIRE(records.size() == 2);

  CHECK(records[0].user_id == "p42");
  CHECK(records[0].profile.age_range == "30-39");
  CHECK(records[0].profile.gender == "Female");
  CHECK(records[0].profile.employment_status == "employed full-time");
  CHECK(records[0].profile.primary_activity == "working");
  CHECK(records[0].profile.occupation == "professional");
  CHECK(records[0].profile.work_from_home == "No");
  CHECK(records[0].profile.driver_on_travel_day == "Yes");
  REQUIRE(records[0].profile.distance_to_work_miles.has_value());
  CHECK(*records[0].profile.distance_to_work_miles == Approx(4.15));
  CHECK(records[0].profile.work_state == "California");
  // Columns absent from the file stay at their sentinel.
  CHECK(records[0].profile.education == "unknown");
  CHECK(records[0].profile.race == "unknown");
  CHECK(records[0].profile.work_schedule == "unknown");

  // Negative survey codes mean "not ascertained"; blanks stay unknown.
  CHECK(records[1].user_id == "p43");
  CHECK(!records[1].profile.distance_to_work_miles.has_value());
  CHECK(records[1].profile.occupation == "unknown");
  CHECK(records[1].profile.work_state == "unknown");
}

TEST_CASE("profiles load from plainly-labeled CSV and JSON") {
  const std::string csv =
      "user_id,gender,employment_status,distance_to_work_miles\n"
      "a1,Male,student,\n";
  const auto from_csv = profile_records_from_text(csv);
  REQUIRE(from_csv.size() == 1);
  CHECK(from_csv[0].user_id == "a1");
  CHECK(from_csv[0].profile.employment_status == "student");
  CHECK(!from_csv[0].profile.distance_to_work_miles.has_value());

  const std::string jsonText = R"([
    {"user_id": 7, "gender": "Female", "occupation": "sales", "distance_to_work_miles": "11.2"},
    {"gender": "Male"}
  ])";
  const auto from_json = profile_records_from_text(jsonText);
  REQUIRE(from_json.size() == 2);
  CHECK(from_json[0].user_id == "7");  // scalar ids are stringified
  CHECK(from_json[0].profile.occupation == "sales");
  REQUIRE(from_json[0].profile.distance_to_work_miles.has_value());
  CHECK(*from_json[0].profile.distance_to_work_miles == Approx(11.2));
  CHECK(from_json[1].user_id == "u0002");  // auto id by position
}

TEST_CASE("profile parsing rejects junk rows and keeps good errors") {
  CHECK(profile_records_from_text("").empty());
  CHECK(profile_records_from_text("  \n \t ").empty());
  CHECK_THROWS_AS(profile_records_from_text("foo,bar\n1,2\n"), IoError);
  CHECK_THROWS_MATCHES(profile_records_from_text("gender,DISTTOWK17\nF,abc\n"), IoError,
                       Catch::Matchers::MessageMatches(
                           Catch::Matchers::ContainsSubstring("not a number")));
  CHECK_THROWS_MATCHES(
      profile_records_from_text("gender\nF,extra\n"), IoError,
      Catch::Matchers::MessageMatches(Catch::Matchers::ContainsSubstring("header")));
  CHECK_THROWS_AS(profile_records_from_text("{\"gender\": \"F\"}"), IoError);  // object, not array
}

TEST_CASE("custom alias tables extend recognition") {
  const AliasTable aliases = parse_alias_table_json(
      R"({"How Old": "age_range", "Employment?": "employment_status", "Member": "user_id"})");
  const std::string csv = "member,how old,employment?\nm9,40-49,part-time\n";
  const auto records = profile_records_from_text(csv, aliases);
  REQUIRE(records.size() == 1);
  CHECK(records[0].user_id == "m9");
  CHECK(records[0].profile.age_range == "40-49");
  CHECK(records[0].profile.employment_status == "part-time");

  CHECK_THROWS_AS(parse_alias_table_json(R"({"x": "not_a_field"})"), IoError);
  CHECK_THROWS_AS(parse_alias_table_json(R"(["x"])"), IoError);
  CHECK_THROWS_AS(parse_alias_table_json(R"({"x": 3})"), IoError);
}

TEST_CASE("schedule json text uses the canonical layout") {
  const DaySchedule day{{seg("home", "00:00", "07:30"), seg("work", "07:30", "24:00")}};
  const std::string expect =
      "[\n"
      "  {\"activity\": \"home\", \"start_time\": \"00:00\", \"end_time\": \"07:30\"},\n"
      "  {\"activity\": \"work\", \"start_time\": \"07:30\", \"end_time\": \"24:00\"}\n"
      "]";
  CHECK(schedule_json_text(day) == expect);
  CHECK(parse_schedule_json(expect) == day);
  CHECK(schedule_json_text(DaySchedule{}) == "[]");

  // Indented for embedding.
  const std::string shifted = schedule_json_text(day, 2);
  CHECK(shifted.substr(0, 4) == "  [\n");
  CHECK(shifted.find("\n    {\"activity\"") != std::string::npos);
}

TEST_CASE("schedule parsing rejects malformed documents") {
  CHECK_THROWS_AS(parse_schedule_json("not json"), DocumentError);
  CHECK_THROWS_AS(parse_schedule_json("{}"), DocumentError);
  CHECK_THROWS_AS(parse_schedule_json("[{\"activity\": \"home\"}]"), DocumentError);
  CHECK_THROWS_AS(parse_schedule_json(
                      "[{\"activity\": \"nap\", \"start_time\": \"00:00\", \"end_time\": \"24:00\"}]"),
                  DocumentError);
  CHECK_THROWS_AS(parse_schedule_json(
                      "[{\"activity\": \"home\", \"start_time\": \"25:00\", \"end_time\": \"26:00\"}]"),
                  DocumentError);
  CHECK_THROWS_AS(parse_schedule_json(
                      "[{\"activity\": \"home\", \"start_time\": \"10:00\", \"end_time\": \"09:00\"}]"),
                  DocumentError);
}

TEST_CASE("profile documents round-trip, including unknown distance") {
  UserProfile p = fixtures::case_profile();
  CHECK(profile_from_json(json::parse(profile_json_text(p))) == p);
  p.distance_to_work_miles.reset();
  const std::string text = profile_json_text(p);
  CHECK(text.find("\"distance_to_work_miles\": \"unknown\"") != std::string::npos);
  CHECK(profile_from_json(json::parse(text)) == p);

  CHECK_THROWS_AS(parse_profile_json("[]"), DocumentError);
  CHECK_THROWS_AS(parse_profile_json(R"({"gender": 5})"), DocumentError);
  CHECK_THROWS_AS(parse_profile_json(R"({"distance_to_work_miles": -2})"), DocumentError);
  // Unlisted keys are ignored; empty strings fall back to the sentinel.
  const UserProfile q = parse_profile_json(R"({"gender": "", "note": "extra"})");
  CHECK(q.gender == "unknown");
}

TEST_CASE("edit scripts round-trip through json for every op kind") {
  EditScript script;
  script.ops.push_back(EditOp{AddOp{2, seg("exercise", "06:00", "06:45")}, "morning run"});
  script.ops.push_back(EditOp{DeleteOp{4}, "drop duplicate"});
  script.ops.push_back(EditOp{ShiftOp{1, TimeOfDay(540), TimeOfDay(1020)}, "stretch work"});
  script.ops.push_back(EditOp{ReplaceOp{3, ActivityType::Medical}, "was mislabeled"});
  script.ops.push_back(EditOp{SplitOp{0, TimeOfDay(390), ActivityType::Work}, "early start"});

  const EditScript back = parse_edit_script_json(edit_script_json_text(script));
  REQUIRE(back.size() == script.size());
  for (std::size_t i = 0; i < script.size(); ++i) {
    CHECK(edit_op_to_json(back.ops[i]) == edit_op_to_json(script.ops[i]));
  }
  const json doc = edit_script_to_json(script);
  CHECK(doc[0]["op"] == "add");
  CHECK(doc[0]["activity"] == "exercise");
  CHECK(doc[2]["new_start"] == "09:00");
  CHECK(doc[4]["split_time"] == "06:30");
  CHECK(doc[4]["second_activity"] == "work");

  CHECK_THROWS_AS(parse_edit_script_json("{}"), DocumentError);
  CHECK_THROWS_AS(parse_edit_script_json(R"([{"op": "warp", "index": 0}])"), DocumentError);
  CHECK_THROWS_AS(parse_edit_script_json(R"([{"op": "delete"}])"), DocumentError);
}

TEST_CASE("violation documents and feedback text") {
  const Violation v{ConstraintCategory::Physical, {2, 3}, "overlap between segment 2 and segment 3"};
  const json doc = violation_to_json(v);
  CHECK(doc["category"] == "Physical");
  CHECK(doc["hardness"] == "Hard");
  CHECK(doc["segment_indices"] == json::array({2, 3}));

  const std::string line = violation_line(v);
  CHECK(line.find("[Hard] Physical:") == 0);
  CHECK(line.find("(segments 2, 3)") != std::string::npos);

  const Violation whole{ConstraintCategory::Coherence, {}, "too fragmented"};
  CHECK(violation_line(whole).find("segment") == std::string::npos);
  const Violation single{ConstraintCategory::Temporal, {1}, "too short"};
  CHECK(violation_line(single).find("(segment 1)") != std::string::npos);

  const std::string feedback = violation_feedback({v, whole});
  CHECK(feedback.rfind("VIOLATIONS DETECTED:\n", 0) == 0);
  CHECK(feedback.find("\"Physical\"") != std::string::npos);
  CHECK(feedback.find("\"Coherence\"") != std::string::npos);
  CHECK(violation_feedback({}) == "VIOLATIONS DETECTED:\n[]");
}

TEST_CASE("duration bounds documents override selectively") {
  const DurationBounds bounds =
      parse_duration_bounds_json(R"({"work": {"min_minutes": 60, "max_minutes": 600}})");
  CHECK(bounds.min_minutes[activity_index(ActivityType::Work)] == 60);
  CHECK(bounds.max_minutes[activity_index(ActivityType::Work)] == 600);
  // Untouched activities keep their defaults.
  const DurationBounds defaults = DurationBounds::defaults();
  CHECK(bounds.min_minutes[activity_index(ActivityType::Shopping)] ==
        defaults.min_minutes[activity_index(ActivityType::Shopping)]);

  CHECK_THROWS_AS(parse_duration_bounds_json(R"({"nap": {"min_minutes": 1, "max_minutes": 2}})"),
                  DocumentError);
  CHECK_THROWS_AS(parse_duration_bounds_json(R"({"work": {"min_minutes": 1}})"), DocumentError);
  CHECK_THROWS_AS(parse_duration_bounds_json(R"({"work": {"min_minutes": 1, "max_minutes": 2,
                                                          "typo": 3}})"),
                  DocumentError);
  CHECK_THROWS_AS(parse_duration_bounds_json(R"({"work": {"min_minutes": 90, "max_minutes": 10}})"),
                  DocumentError);  // validate() runs on the merged table
}

TEST_CASE("commonsense rule documents parse into working rules") {
  const auto rules = parse_commonsense_rules_json(R"([
    {"fields": ["occupation"], "patterns": ["chef"], "activity": "dine_out",
     "min_episode_minutes": 180, "message": "chefs rarely dine out this long"}
  ])");
  REQUIRE(rules.size() == 1);
  CHECK(rules[0].fields == std::vector<std::string>{"occupation"});
  CHECK(rules[0].activity == ActivityType::DineOut);
  CHECK(rules[0].min_episode_minutes == 180);
  CHECK(rules[0].fire_when_matched);  // default
  CHECK(!rules[0].informational);     // default

  UserProfile chef;
  chef.occupation = "Head Chef";
  DaySchedule day{{seg("home", "00:00", "12:00"), seg("dine_out", "12:00", "16:00"),
                   seg("home", "16:00", "24:00")}};
  CHECK(check_commonsense(chef, day, rules).size() == 1);
  chef.occupation = "engineer";
  CHECK(check_commonsense(chef, day, rules).empty());

  CHECK_THROWS_AS(parse_commonsense_rules_json("{}"), DocumentError);
  CHECK_THROWS_AS(parse_commonsense_rules_json(R"([{"patterns": ["x"], "message": "m"}])"),
                  DocumentError);
  CHECK_THROWS_AS(parse_commonsense_rules_json(R"([{"fields": ["f"], "message": "m", "oops": 1}])"),
                  DocumentError);
}

TEST_CASE("population files round-trip byte for byte") {
  ScheduleSet set;
  set.push_back({"u1", fixtures::all_day("home")});
  set.push_back({"u2", fixtures::case_truth()});

  const std::string text = population_json_text(set);
  const std::string expect_head =
      "[\n"
      "  {\n"
      "    \"user_id\": \"u1\",\n"
      "    \"schedule\": [\n"
      "      {\"activity\": \"home\", \"start_time\": \"00:00\", \"end_time\": \"24:00\"}\n"
      "    ]\n"
      "  },\n";
  CHECK(text.substr(0, expect_head.size()) == expect_head);
  CHECK(text.back() == '\n');

  const ScheduleSet loaded = population_from_text(text);
  REQUIRE(loaded.size() == 2);
  CHECK(loaded[0].user_id == "u1");
  CHECK(loaded[1].schedule == fixtures::case_truth());
  CHECK(population_json_text(loaded) == text);

  CHECK(population_json_text({}) == "[]\n");
  CHECK(population_from_text("[]\n").empty());
}

TEST_CASE("population parsing enforces shape and validity") {
  CHECK_THROWS_AS(population_from_text("{}"), IoError);
  CHECK_THROWS_AS(population_from_text("[3]"), IoError);
  CHECK_THROWS_AS(population_from_text(R"([{"schedule": []}])"), IoError);
  CHECK_THROWS_AS(population_from_text(R"([{"user_id": "a"}])"), IoError);
  CHECK_THROWS_AS(population_from_text(
                      R"([{"user_id": "a", "schedule": [], "extra": 1}])"),
                  IoError);

  ScheduleSet set;
  set.push_back({"dup", fixtures::all_day("home")});
  set.push_back({"dup", fixtures::all_day("home")});
  CHECK_THROWS_MATCHES(population_from_text(population_json_text(set)), IoError,
                       Catch::Matchers::MessageMatches(
                           Catch::Matchers::ContainsSubstring("duplicate user_id 'dup'")));

  // A hard-invalid schedule is rejected by name in strict mode, kept in lax.
  ScheduleSet bad;
  bad.push_back({"crooked", DaySchedule{{seg("work", "01:00", "20:00")}}});
  const std::string text = population_json_text(bad);
  CHECK_THROWS_MATCHES(population_from_text(text), IoError,
                       Catch::Matchers::MessageMatches(Catch::Matchers::ContainsSubstring(
                           "user 'crooked': schedule violates hard constraints")));
  CHECK(population_from_text(text, false).size() == 1);

  // A structurally-broken schedule names its user too.
  const std::string broken = R"([{"user_id": "b7", "schedule": [{"activity": "home"}]}])";
  CHECK_THROWS_MATCHES(population_from_text(broken), IoError,
                       Catch::Matchers::MessageMatches(
                           Catch::Matchers::ContainsSubstring("user 'b7'")));
}

TEST_CASE("files round-trip through disk and errors carry paths") {
  TempDir dir;
  ScheduleSet set;
  set.push_back({"u1", fixtures::case_edited()});
  save_population(dir.file("pop.json"), set);
  const ScheduleSet loaded = load_population(dir.file("pop.json"));
  REQUIRE(loaded.size() == 1);
  CHECK(loaded[0].schedule == fixtures::case_edited());

  CHECK_THROWS_MATCHES(load_population(dir.file("missing.json")), IoError,
                       Catch::Matchers::MessageMatches(
                           Catch::Matchers::ContainsSubstring("missing.json")));
  write_text_file(dir.file("profiles.csv"), "user_id,gender\ng1,Female\n");
  const auto profiles = load_profiles(dir.file("profiles.csv"));
  REQUIRE(profiles.size() == 1);
  CHECK(profiles[0].gender == "Female");
  CHECK_THROWS_AS(load_profiles(dir.file("nope.csv")), IoError);
}

TEST_CASE("roll-out records parse from JSONL lines") {
  const std::string line = R"({"prompt_id": "p1", "rollout_text": "[THOUGHT]x[/THOUGHT]",
    "ground_truth_schedule": [
      {"activity": "home", "start_time": "00:00", "end_time": "24:00"}]})";
  const RolloutRecord rec = parse_rollout_line(line);
  CHECK(rec.prompt_id == "p1");
  CHECK(rec.rollout_text == "[THOUGHT]x[/THOUGHT]");
  CHECK(rec.ground_truth == fixtures::all_day("home"));

  CHECK_THROWS_AS(parse_rollout_line("not json"), IoError);
  CHECK_THROWS_AS(parse_rollout_line("[]"), IoError);
  CHECK_THROWS_AS(parse_rollout_line(R"({"prompt_id": "p", "rollout_text": "x"})"), IoError);
  CHECK_THROWS_AS(parse_rollout_line(
                      R"({"prompt_id": 1, "rollout_text": "x", "ground_truth_schedule": []})"),
                  IoError);
  CHECK_THROWS_AS(parse_rollout_line(
                      R"({"prompt_id": "p", "rollout_text": "x", "ground_truth_schedule": 5})"),
                  IoError);
}

TEST_CASE("run config parses, layers, and validates") {
  SECTION("defaults") {
    const RunConfig cfg = parse_run_config_json("{}");
    CHECK(cfg.base_url == "http://localhost:8000/v1");
    CHECK(cfg.model_name == "editor");
    CHECK(cfg.max_rounds == 3);
    CHECK(cfg.concurrency == 1);
    CHECK(cfg.seed == 0);
  }
  SECTION("full object") {
    const RunConfig cfg = parse_run_config_json(R"({
      "base_url": "http://card:9000/v1", "model_name": "tuned",
      "api_key_file": "/tmp/key", "bounds_path": "b.json", "rules_path": "r.json",
      "profiles_path": "p.csv", "output_path": "o.json", "provenance_path": "prov.jsonl",
      "max_rounds": 5, "concurrency": 4, "seed": 99})");
    CHECK(cfg.base_url == "http://card:9000/v1");
    CHECK(cfg.model_name == "tuned");
    CHECK(cfg.api_key_file == "/tmp/key");
    CHECK(cfg.max_rounds == 5);
    CHECK(cfg.concurrency == 4);
    CHECK(cfg.seed == 99);
  }
  SECTION("hostile keys are rejected") {
    CHECK_THROWS_AS(parse_run_config_json(R"({"api_keys": "x"})"), IoError);
    CHECK_THROWS_MATCHES(parse_run_config_json(R"({"api_key": "sk-123"})"), IoError,
                         Catch::Matchers::MessageMatches(Catch::Matchers::ContainsSubstring(
                             "use the environment or a key file")));
    CHECK_THROWS_AS(parse_run_config_json(R"({"seed": -4})"), IoError);
    CHECK_THROWS_AS(parse_run_config_json(R"({"max_rounds": "three"})"), IoError);
    CHECK_THROWS_AS(parse_run_config_json("[]"), IoError);
  }
  SECTION("environment overrides the file layer") {
    RunConfig cfg = parse_run_config_json(R"({"base_url": "http://file/v1"})");
    setenv("ACTSCHED_BASE_URL", "http://env/v1", 1);
    setenv("ACTSCHED_MODEL", "env-model", 1);
    setenv("ACTSCHED_API_KEY", "env-key", 1);
    apply_environment(cfg);
    unsetenv("ACTSCHED_BASE_URL");
    unsetenv("ACTSCHED_MODEL");
    unsetenv("ACTSCHED_API_KEY");
    CHECK(cfg.base_url == "http://env/v1");
    CHECK(cfg.model_name == "env-model");
    CHECK(cfg.api_key == "env-key");
  }
  SECTION("finalize reads the key file and strips the trailing newline") {
    TempDir dir;
    write_text_file(dir.file("key.txt"), "sk-local-secret\n");
    RunConfig cfg;
    cfg.api_key_file = dir.file("key.txt");
    finalize_run_config(cfg);
    CHECK(cfg.api_key == "sk-local-secret");

    // An explicit key beats the file.
    RunConfig cfg2;
    cfg2.api_key = "direct";
    cfg2.api_key_file = dir.file("key.txt");
    finalize_run_config(cfg2);
    CHECK(cfg2.api_key == "direct");
  }
  SECTION("finalize enforces invariants") {
    RunConfig cfg;
    cfg.max_rounds = 0;
    CHECK_THROWS_AS(finalize_run_config(cfg), IoError);
    cfg = RunConfig{};
    cfg.concurrency = 0;
    CHECK_THROWS_AS(finalize_run_config(cfg), IoError);
    cfg = RunConfig{};
    cfg.base_url.clear();
    CHECK_THROWS_AS(finalize_run_config(cfg), IoError);
  }
}
