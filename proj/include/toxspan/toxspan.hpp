#pragma once

#include "toxspan/augment.hpp"
#include "toxspan/classifiers.hpp"
#include "toxspan/corpus.hpp"
#include "toxspan/error.hpp"
#include "toxspan/eval.hpp"
#include "toxspan/linear_model.hpp"
#include "toxspan/pipeline.hpp"
#include "toxspan/span_set.hpp"
#include "toxspan/tokenizer.hpp"
#include "toxspan/unicode.hpp"
