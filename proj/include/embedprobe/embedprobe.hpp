#pragma once

#include "embedprobe/bench.hpp"
#include "embedprobe/cross_validate.hpp"
#include "embedprobe/embedding_store.hpp"
#include "embedprobe/error.hpp"
#include "embedprobe/logreg.hpp"
#include "embedprobe/metrics.hpp"
#include "embedprobe/reduce.hpp"
#include "embedprobe/svm.hpp"
#include "embedprobe/task_corpus.hpp"
