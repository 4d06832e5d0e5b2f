#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "actsched/constraints.hpp"
#include "fixtures.hpp"
#include "generators.hpp"

using namespace actsched;
using fixtures::seg;

namespace {

int count_category(const std::vector<Violation>& vs, ConstraintCategory c) {
  int n = 0;
  for (const auto& v : vs) n += v.category == c;
  return n;
}

int count_hard(const std::vector<Violation>& vs) {
  int n = 0;
  for (const auto& v : vs) n += hardness_of(v.category) == Hardness::Hard;
  return n;
}

}  // namespace

TEST_CASE("category hardness split") {
  CHECK(hardness_of(ConstraintCategory::Physical) == Hardness::Hard);
  CHECK(hardness_of(ConstraintCategory::Logical) == Hardness::Hard);
  CHECK(hardness_of(ConstraintCategory::Commonsense) == Hardness::Soft);
  CHECK(hardness_of(ConstraintCategory::Temporal) == Hardness::Soft);
  CHECK(hardness_of(ConstraintCategory::Coherence) == Hardness::Soft);
  CHECK(try_parse_category("Physical") == ConstraintCategory::Physical);
  CHECK(!try_parse_category("physical"));
}

TEST_CASE("physical check finds boundary, overlap, and gap faults") {
  SECTION("late start") {
    const auto vs = check_physical(DaySchedule{{seg("home", "00:30", "24:00")}});
    REQUIRE(vs.size() == 1);
    CHECK(vs[0].category == ConstraintCategory::Physical);
    CHECK(vs[0].segment_indices == std::vector<int>{0});
    CHECK(vs[0].description.find("00:30") != std::string::npos);
  }
  SECTION("early end") {
    const auto vs = check_physical(DaySchedule{{seg("home", "00:00", "23:00")}});
    REQUIRE(vs.size() == 1);
    CHECK(vs[0].segment_indices == std::vector<int>{0});
    CHECK(vs[0].description.find("23:00") != std::string::npos);
  }
  SECTION("overlap names both segments") {
    DaySchedule day{{seg("home", "00:00", "10:00"), seg("work", "09:00", "24:00")}};
    const auto vs = check_physical(day);
    REQUIRE(vs.size() == 1);
    CHECK(vs[0].segment_indices == std::vector<int>{0, 1});
  }
  SECTION("gap names the flanking segments") {
    DaySchedule day{{seg("home", "00:00", "10:00"), seg("work", "10:30", "24:00")}};
    const auto vs = check_physical(day);
    REQUIRE(vs.size() == 1);
    CHECK(vs[0].segment_indices == std::vector<int>{0, 1});
    CHECK(vs[0].description.find("10:00") != std::string::npos);
    CHECK(vs[0].description.find("10:30") != std::string::npos);
  }
  SECTION("a segment swallowed by an earlier one is an overlap, not a gap") {
    DaySchedule day{{seg("home", "00:00", "12:00"), seg("work", "05:00", "06:00"),
                     seg("shopping", "12:00", "24:00")}};
    const auto vs = check_physical(normalize(day));
    REQUIRE(vs.size() == 1);
    CHECK(vs[0].description.find("overlap") != std::string::npos);
  }
  SECTION("clean day has no physical violations") {
    CHECK(check_physical(fixtures::case_truth()).empty());
    CHECK(check_physical(fixtures::all_day("home")).empty());
  }
}

TEST_CASE("logical check enforces home boundaries and merged duplicates") {
  SECTION("non-home start and end") {
    DaySchedule day{{seg("work", "00:00", "12:00"), seg("shopping", "12:00", "24:00")}};
    const auto vs = check_logical(day);
    REQUIRE(vs.size() == 2);
    CHECK(vs[0].segment_indices == std::vector<int>{0});
    CHECK(vs[1].segment_indices == std::vector<int>{1});
  }
  SECTION("adjacent duplicates flagged pairwise") {
    DaySchedule day{{seg("home", "00:00", "08:00"), seg("work", "08:00", "12:00"),
                     seg("work", "13:00", "17:00"), seg("home", "17:00", "24:00")}};
    // Non-touching duplicates still violate the merge mandate (the gap is a
    // separate physical fault).
    const auto vs = check_logical(day);
    REQUIRE(vs.size() == 1);
    CHECK(vs[0].segment_indices == std::vector<int>{1, 2});
    CHECK(vs[0].description.find("work") != std::string::npos);
  }
  SECTION("clean day") { CHECK(check_logical(fixtures::case_truth()).empty()); }
}

TEST_CASE("commonsense rules react to the profile") {
  DaySchedule working_day{{seg("home", "00:00", "09:00"), seg("work", "09:00", "17:00"),
                           seg("home", "17:00", "24:00")}};

  SECTION("retired profile with a long work block fires") {
    UserProfile retired;
    retired.employment_status = "Retired";
    const auto vs = check_commonsense(retired, working_day);
    REQUIRE(vs.size() == 1);
    CHECK(vs[0].category == ConstraintCategory::Commonsense);
    CHECK(vs[0].segment_indices == std::vector<int>{1});
  }
  SECTION("short work errand for a retired profile passes") {
    UserProfile retired;
    retired.primary_activity = "retired or homemaker";
    DaySchedule errand{{seg("home", "00:00", "09:00"), seg("work", "09:00", "10:30"),
                        seg("home", "10:30", "24:00")}};
    CHECK(check_commonsense(retired, errand).empty());  // 90 min < 120 min threshold
  }
  SECTION("employed profile does not trip the retired rule") {
    UserProfile employed;
    employed.employment_status = "employed full-time";
    CHECK(check_commonsense(employed, working_day).empty());
  }
  SECTION("work-from-home note fires on any work segment") {
    UserProfile wfh;
    wfh.work_from_home = "Yes";
    const auto vs = check_commonsense(wfh, working_day);
    REQUIRE(vs.size() == 1);
    CHECK(vs[0].description.find("note:") != std::string::npos);
  }
  SECTION("long education without student evidence fires; student passes") {
    DaySchedule school{{seg("home", "00:00", "08:00"), seg("education", "08:00", "14:00"),
                        seg("home", "14:00", "24:00")}};
    UserProfile plain;
    const auto vs = check_commonsense(plain, school);
    REQUIRE(vs.size() == 1);
    CHECK(vs[0].segment_indices == std::vector<int>{1});

    UserProfile student;
    student.primary_activity = "full-time Student";
    CHECK(check_commonsense(student, school).empty());
  }
}

TEST_CASE("temporal bounds are inclusive on both edges") {
  const DurationBounds bounds = DurationBounds::defaults();
  const auto day_with_work = [](const char* end) {
    return DaySchedule{{seg("home", "00:00", "09:00"), seg("work", "09:00", end),
                        seg("home", end, "24:00")}};
  };
  CHECK(check_temporal(day_with_work("09:30"), bounds).empty());  // exactly 30 min
  const auto vs = check_temporal(day_with_work("09:29"), bounds);
  REQUIRE(vs.size() == 1);
  CHECK(vs[0].category == ConstraintCategory::Temporal);
  CHECK(vs[0].segment_indices == std::vector<int>{1});
  CHECK(vs[0].description.find("29 min") != std::string::npos);

  // dropoff_pickup tops out at 60 min.
  DaySchedule dropoff{{seg("home", "00:00", "09:00"), seg("dropoff_pickup", "09:00", "10:00"),
                       seg("home", "10:00", "24:00")}};
  CHECK(check_temporal(dropoff, bounds).empty());
  DaySchedule long_dropoff{{seg("home", "00:00", "09:00"), seg("dropoff_pickup", "09:00", "10:01"),
                            seg("home", "10:01", "24:00")}};
  CHECK(check_temporal(long_dropoff, bounds).size() == 1);
}

TEST_CASE("duration bounds table validates its own shape") {
  DurationBounds b = DurationBounds::defaults();
  CHECK_NOTHROW(b.validate());
  b.min_minutes[activity_index(ActivityType::Work)] = 0;
  CHECK_THROWS_AS(b.validate(), std::invalid_argument);
  b = DurationBounds::defaults();
  b.max_minutes[activity_index(ActivityType::Home)] = kMinutesPerDay + 1;
  CHECK_THROWS_AS(b.validate(), std::invalid_argument);
  b = DurationBounds::defaults();
  b.min_minutes[activity_index(ActivityType::Shopping)] = 300;  // above its max of 240
  CHECK_THROWS_AS(b.validate(), std::invalid_argument);
}

TEST_CASE("coherence flags fragmentation and short detours") {
  SECTION("episode cap") {
    DaySchedule shredded;
    int t = 0;
    for (int i = 0; i < 13; ++i) {
      const int next = i == 12 ? kMinutesPerDay : t + 60;
      shredded.segments.push_back(ActivitySegment(i % 2 == 0 ? ActivityType::Home
                                                             : ActivityType::Work,
                                                  TimeOfDay(t), TimeOfDay(next)));
      t = next;
    }
    const auto vs = check_coherence(shredded);
    REQUIRE(vs.size() == 1);
    CHECK(vs[0].category == ConstraintCategory::Coherence);
    CHECK(vs[0].segment_indices.empty());  // whole-schedule finding
  }
  SECTION("ten-minute detour fires, fifteen-minute does not") {
    const auto detour_day = [](const char* back) {
      return DaySchedule{{seg("home", "00:00", "09:00"), seg("work", "09:00", "12:00"),
                          seg("shopping", "12:00", back), seg("work", back, "18:00"),
                          seg("home", "18:00", "24:00")}};
    };
    const auto vs = check_coherence(detour_day("12:10"));
    REQUIRE(vs.size() == 1);
    CHECK(vs[0].segment_indices == std::vector<int>{1, 2, 3});
    CHECK(check_coherence(detour_day("12:15")).empty());
  }
}

TEST_CASE("audit reports the draft day's single hard fault") {
  const auto vs = audit(fixtures::case_profile(), fixtures::case_draft(),
                        DurationBounds::defaults());
  REQUIRE(count_hard(vs) == 1);
  CHECK(count_category(vs, ConstraintCategory::Logical) == 0);

  const Violation* hard = nullptr;
  for (const auto& v : vs) {
    if (hardness_of(v.category) == Hardness::Hard) hard = &v;
  }
  REQUIRE(hard != nullptr);
  CHECK(hard->category == ConstraintCategory::Physical);
  CHECK(hard->segment_indices == std::vector<int>{2, 3});
  CHECK(hard->description.find("16:45-18:00") != std::string::npos);
  CHECK(hard->description.find("17:45-19:00") != std::string::npos);
}

TEST_CASE("audit passes the edited and observed case days") {
  const DurationBounds bounds = DurationBounds::defaults();
  for (const DaySchedule& day : {fixtures::case_edited(), fixtures::case_truth()}) {
    const auto vs = audit(fixtures::case_profile(), day, bounds);
    CHECK(count_hard(vs) == 0);
    CHECK(is_hard_valid(day));
  }
}

TEST_CASE("audit normalizes before checking") {
  // Shuffled but complete day: order alone must not trigger violations.
  DaySchedule shuffled{{seg("home", "17:00", "24:00"), seg("home", "00:00", "09:00"),
                        seg("work", "09:00", "17:00")}};
  CHECK(count_hard(audit(UserProfile{}, shuffled, DurationBounds::defaults())) == 0);
  CHECK(is_hard_valid(shuffled));
}

TEST_CASE("hard validity basics") {
  CHECK(!is_hard_valid(DaySchedule{}));
  CHECK(is_hard_valid(fixtures::all_day("home")));
  CHECK(!is_hard_valid(fixtures::all_day("work")));  // wrong boundary activity
  CHECK(!is_hard_valid(fixtures::case_draft()));
}

TEST_CASE("random hard-valid schedules audit clean on hard categories") {
  std::mt19937_64 rng(99);
  const DurationBounds bounds = DurationBounds::defaults();
  for (int trial = 0; trial < 100; ++trial) {
    const DaySchedule day = testgen::random_hard_valid(rng);
    CHECK(is_hard_valid(day));
    CHECK(count_hard(audit(UserProfile{}, day, bounds)) == 0);
  }
}

TEST_CASE("violation text renders category and indices") {
  const Violation v{ConstraintCategory::Physical, {2, 3}, "overlap between things"};
  CHECK(category_label(v.category) == std::string("Physical"));
  CHECK(hardness_label(hardness_of(v.category)) == std::string("Hard"));
}
