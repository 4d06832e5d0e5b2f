#pragma once

// Umbrella header: the whole library in one include.

#include "actsched/schedule.hpp"
#include "actsched/stats.hpp"
#include "actsched/constraints.hpp"
#include "actsched/edit.hpp"
#include "actsched/documents.hpp"
#include "actsched/tagged_text.hpp"
#include "actsched/reward.hpp"
#include "actsched/metrics.hpp"
#include "actsched/prompts.hpp"
#include "actsched/endpoint.hpp"
#include "actsched/mock_client.hpp"
#include "actsched/orchestrator.hpp"
#include "actsched/io.hpp"
