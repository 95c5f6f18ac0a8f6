/*
 * Copyright 2026 The treeagg Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef TREEAGG_TREEAGG_HPP_
#define TREEAGG_TREEAGG_HPP_

#include "treeagg/aggregation.hpp"
#include "treeagg/binning.hpp"
#include "treeagg/criteria.hpp"
#include "treeagg/csv.hpp"
#include "treeagg/datasets.hpp"
#include "treeagg/error.hpp"
#include "treeagg/experiments.hpp"
#include "treeagg/file_io.hpp"
#include "treeagg/forest.hpp"
#include "treeagg/grower.hpp"
#include "treeagg/histogram.hpp"
#include "treeagg/metrics.hpp"
#include "treeagg/model_io.hpp"
#include "treeagg/oracle.hpp"
#include "treeagg/random.hpp"
#include "treeagg/sampling.hpp"
#include "treeagg/split.hpp"
#include "treeagg/tree.hpp"

#endif  // TREEAGG_TREEAGG_HPP_
