// Copyright 2026 The nrhc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef NRHC_FORMAT_H_
#define NRHC_FORMAT_H_

#include <string>

#include <Eigen/Core>

namespace nrhc {

// Shortest decimal text that parses back to the same double; "inf",
// "-inf" and "nan" for non-finite values.
std::string FormatDouble(double x);

// "[a, b, c]" with FormatDouble entries.
std::string FormatList(const Eigen::VectorXd& v);

}  // namespace nrhc

#endif  // NRHC_FORMAT_H_
