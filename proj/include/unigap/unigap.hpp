#pragma once

#include "unigap/adversary_lab.hpp"
#include "unigap/classes.hpp"
#include "unigap/error.hpp"
#include "unigap/game.hpp"
#include "unigap/harness.hpp"
#include "unigap/history.hpp"
#include "unigap/hypothesis.hpp"
#include "unigap/learner.hpp"
#include "unigap/metric.hpp"
#include "unigap/rng.hpp"
#include "unigap/sample.hpp"
#include "unigap/schedule.hpp"
#include "unigap/tree.hpp"
