// zslkit/vector-bag.h

// Copyright 2026  zslkit authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.


#ifndef ZSLKIT_VECTOR_BAG_H_
#define ZSLKIT_VECTOR_BAG_H_

#include "zslkit/zsl-common.h"

namespace zsl {

/// Unordered set of D-dimensional vectors attached to one class, stored one
/// vector per row (word vectors of a document, or image features).
struct VectorBag {
  ClassId class_id = 0;
  Matrix vectors;

  Eigen::Index size() const { return vectors.rows(); }
  Eigen::Index dim() const { return vectors.cols(); }
};

}  // namespace zsl

#endif  // ZSLKIT_VECTOR_BAG_H_
