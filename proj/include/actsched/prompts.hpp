#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

#include "actsched/constraints.hpp"
#include "actsched/documents.hpp"
#include "actsched/schedule.hpp"

namespace actsched {

struct PromptPair {
  std::string system_text;
  std::string user_text;
};

// The five templates, byte-for-byte. User-message templates carry {named}
// placeholders; system texts are fixed.
namespace prompts {

inline constexpr std::string_view kIntentionSystem =
    R"(You are a daily schedule planner. Given a person's profile, generate a complete and realistic 24-hour schedule with exact start/end times.

RULES:
- Use ONLY these activity types: home, work, education, shopping, service, medical, dine_out, socialize, exercise, dropoff_pickup
- Schedule MUST cover full 24 hours: start at 00:00, end at 24:00, NO gaps or overlaps
- Must start and end with "home"
- Consecutive activities must connect (end_time of one = start_time of the next)
- Durations must be realistic based on the person's profile

OUTPUT FORMAT:
{
  "reasoning": "Brief explanation of the schedule choices",
  "schedule": [
    {"activity": "home", "start_time": "00:00", "end_time": "07:30"},
    {"activity": "work", "start_time": "07:30", "end_time": "17:00"},
    {"activity": "home", "start_time": "17:00", "end_time": "24:00"}
  ]
})";

inline constexpr std::string_view kIntentionUserTemplate =
    R"(Generate a complete 24-hour schedule for this person:

- Age range: {age_range}
- Gender: {gender}
- Race: {race}
- Education: {education}
- Employment status: {employment_status}
- Work schedule: {work_schedule}
- Occupation: {occupation}
- Primary activity: {primary_activity}
- Work from home: {work_from_home}
- Driver on travel day: {driver_on_travel_day}
- Distance to work (miles): {distance_to_work_miles}
- Work state: {work_state})";

inline constexpr std::string_view kEditorSystem =
    R"(You are an Editor Agent for daily schedule refinement.

Your task:
1. Check the INITIAL SCHEDULE against 5 constraint types:
   Physical, Logical, Common Sense, Temporal, and Coherence
2. Identify any violations in the draft
3. Apply edit operations from the action space:
   ADD / DELETE / SHIFT / REPLACE / SPLIT
4. Output the final constraint-satisfying schedule

OUTPUT FORMAT:
[THOUGHT]
Constraint Checking:
1. Physical Constraints (Hard): overlaps, 24h coverage, ends at 24:00
2. Logical Constraints (Hard): starts/ends at home, starts at 00:00, consecutive identical activities must be merged
3. Common Sense Constraints (Soft): activities match socio-demographic profile
4. Temporal Constraints (Soft): realistic durations for each activity type
5. Coherence Constraints (Soft): logical transitions, not over-fragmented

Edit Operations Applied:
- ADD: activity 'Y' at time HH:MM (reason)
- DELETE: activity 'X' at index N (reason)
- SHIFT: activity 'Z' start/end time adjustment (reason)
- REPLACE: activity 'A' -> 'B' (reason)
- SPLIT: activity 'X' divided into two segments (reason)

Final Result: All constraints satisfied / Violations remain
[/THOUGHT]

[JSON]
[final schedule as JSON array]
[/JSON])";

inline constexpr std::string_view kEditorUserTemplate =
    R"(PERSON PROFILE:
{user_profile as JSON}

INITIAL SCHEDULE:
{initial_schedule as JSON})";

inline constexpr std::string_view kTeacherSystem =
    R"(You are a schedule planning expert. You understand human behavior patterns and generate realistic daily schedules.)";

inline constexpr std::string_view kTeacherUserTemplate =
    R"(You are a Critic and Editor Agent. Your job is to validate and refine a daily schedule.

PERSON PROFILE:
{user_profile as JSON}

INITIAL SCHEDULE (from unified 2-stage generator):
{initial_schedule as JSON}

GROUND TRUTH REFERENCE (for comparison):
{ground_truth_schedule as JSON}

YOUR TASK:
Act as the Editor. Check constraints on the INITIAL SCHEDULE, identify violations, and apply edits to match the GROUND TRUTH.

OUTPUT FORMAT:
[THOUGHT]
Constraint Checking:
1. Physical (Hard): overlaps? 24h coverage? ends at 24:00? -> Yes / No
2. Logical (Hard): starts/ends home? starts at 00:00? -> Yes / No
3. Common Sense (Soft): activities match profile? -> Yes / No
4. Temporal (Soft): realistic durations? -> Yes / No
5. Coherence (Soft): logical flow? not fragmented? -> Yes / No

Edits to Match Ground Truth:
If already matches: No edits needed
Otherwise list each operation:
- DELETE: 'X' at idx N (reason)
- ADD: 'Y' at time HH:MM (reason)
- SHIFT: 'Z' time adjustment (reason)
- REPLACE: 'A' -> 'B' (reason)

Final Result:
All constraints satisfied after edits? Yes / No
[/THOUGHT]

[JSON]
[final schedule - must match the GROUND TRUTH]
[/JSON]

Be thorough in checking each constraint on the INITIAL SCHEDULE.
Show edit operations explicitly if violations are found.)";

inline constexpr std::string_view kStudentSystem =
    R"(You are a Critic and Editor Agent for daily schedule refinement.

Your task:
1. Check the INITIAL SCHEDULE against 5 constraint types:
   Physical, Logical, Common Sense, Temporal, and Coherence
2. Identify any violations
3. Apply edit operations:
   ADD / DELETE / SHIFT / REPLACE
4. Output the refined schedule

OUTPUT FORMAT:
[THOUGHT]
Constraint Checking:
1. Physical Constraints (Hard): overlaps, 24h coverage, ends at 24:00
2. Logical Constraints (Hard): starts/ends at home, starts at 00:00
3. Common Sense Constraints (Soft): age/employment appropriate activities
4. Temporal Constraints (Soft): realistic durations
5. Coherence Constraints (Soft): logical transitions, not over-fragmented

Applying Edit Operations:
- DELETE: activity 'X' at index N (reason)
- ADD: activity 'Y' at time HH:MM (reason)
- SHIFT: activity time adjustment (reason)
- REPLACE: activity type change (reason)

Final Result: Yes / No
[/THOUGHT]

[JSON]
[refined schedule as JSON array]
[/JSON])";

inline constexpr std::string_view kGrpoSystem =
    R"(You are a daily activity schedule generator. Your task is to generate a realistic daily schedule for a person based on their profile.

OUTPUT FORMAT:
[THOUGHT]
Brief reasoning about the person's schedule patterns.
[/THOUGHT]

[JSON]
[
  {"activity": "home", "start_time": "00:00", "end_time": "07:00"}
]
[/JSON]

The schedule must start at 00:00 and end at 24:00, covering the full day without gaps or overlaps.)";

inline constexpr std::string_view kGrpoUserTemplate =
    R"(Generate a daily schedule for this person:
{user_profile as JSON})";

}  // namespace prompts

namespace detail {

inline void replace_placeholder(std::string& text, std::string_view token,
                                std::string_view value) {
  const std::size_t at = text.find(token);
  if (at == std::string::npos) {
    throw std::logic_error("template is missing placeholder " + std::string(token));
  }
  text.replace(at, token.size(), value);
}

}  // namespace detail

inline PromptPair render_intention_prompt(const UserProfile& profile) {
  std::string user(prompts::kIntentionUserTemplate);
  detail::replace_placeholder(user, "{age_range}", profile.age_range);
  detail::replace_placeholder(user, "{gender}", profile.gender);
  detail::replace_placeholder(user, "{race}", profile.race);
  detail::replace_placeholder(user, "{education}", profile.education);
  detail::replace_placeholder(user, "{employment_status}", profile.employment_status);
  detail::replace_placeholder(user, "{work_schedule}", profile.work_schedule);
  detail::replace_placeholder(user, "{occupation}", profile.occupation);
  detail::replace_placeholder(user, "{primary_activity}", profile.primary_activity);
  detail::replace_placeholder(user, "{work_from_home}", profile.work_from_home);
  detail::replace_placeholder(user, "{driver_on_travel_day}", profile.driver_on_travel_day);
  detail::replace_placeholder(user, "{distance_to_work_miles}", distance_text(profile));
  detail::replace_placeholder(user, "{work_state}", profile.work_state);
  return {std::string(prompts::kIntentionSystem), std::move(user)};
}

inline PromptPair render_editor_prompt(const UserProfile& profile, const DaySchedule& draft) {
  if (draft.empty()) throw std::invalid_argument("editor prompt needs a non-empty draft");
  std::string user(prompts::kEditorUserTemplate);
  detail::replace_placeholder(user, "{user_profile as JSON}", profile_json_text(profile));
  detail::replace_placeholder(user, "{initial_schedule as JSON}", schedule_json_text(draft));
  return {std::string(prompts::kEditorSystem), std::move(user)};
}

inline PromptPair render_teacher_prompt(const UserProfile& profile, const DaySchedule& draft,
                                        const DaySchedule& ground_truth) {
  if (draft.empty()) throw std::invalid_argument("teacher prompt needs a non-empty draft");
  if (!is_hard_valid(ground_truth)) {
    throw std::invalid_argument("teacher prompt needs a hard-valid ground truth");
  }
  std::string user(prompts::kTeacherUserTemplate);
  detail::replace_placeholder(user, "{user_profile as JSON}", profile_json_text(profile));
  detail::replace_placeholder(user, "{initial_schedule as JSON}", schedule_json_text(draft));
  detail::replace_placeholder(user, "{ground_truth_schedule as JSON}",
                              schedule_json_text(ground_truth));
  return {std::string(prompts::kTeacherSystem), std::move(user)};
}

/// SFT student inference prompt; the training target is composed separately.
inline PromptPair render_student_prompt(const UserProfile& profile, const DaySchedule& draft) {
  if (draft.empty()) throw std::invalid_argument("student prompt needs a non-empty draft");
  std::string user(prompts::kEditorUserTemplate);
  detail::replace_placeholder(user, "{user_profile as JSON}", profile_json_text(profile));
  detail::replace_placeholder(user, "{initial_schedule as JSON}", schedule_json_text(draft));
  return {std::string(prompts::kStudentSystem), std::move(user)};
}

inline PromptPair render_grpo_prompt(const UserProfile& profile) {
  std::string user(prompts::kGrpoUserTemplate);
  detail::replace_placeholder(user, "{user_profile as JSON}", profile_json_text(profile));
  return {std::string(prompts::kGrpoSystem), std::move(user)};
}

}  // namespace actsched
