#pragma once

#include "caco/autodiff.hpp"
#include "caco/classifier.hpp"
#include "caco/config.hpp"
#include "caco/data.hpp"
#include "caco/embedder.hpp"
#include "caco/error.hpp"
#include "caco/eval.hpp"
#include "caco/grad_check.hpp"
#include "caco/model.hpp"
#include "caco/model_store.hpp"
#include "caco/objectives.hpp"
#include "caco/ops.hpp"
#include "caco/pipeline.hpp"
#include "caco/random.hpp"
#include "caco/synthetic.hpp"
#include "caco/tensor.hpp"
#include "caco/text.hpp"
#include "caco/trainer.hpp"
