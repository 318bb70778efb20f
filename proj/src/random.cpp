/* Copyright 2026 The rfspec Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 *
 */

#include "rfs/random.hpp"

#include <string>

#include "rfs/error.hpp"

namespace rfs {

EntryKind parse_entry_kind(std::string_view name) {
  if (name == "gaussian") return EntryKind::Gaussian;
  if (name == "rademacher") return EntryKind::Rademacher;
  if (name == "uniform") return EntryKind::Uniform;
  throw UsageError("unknown entry distribution '" + std::string(name) +
                   "' (known: gaussian, rademacher, uniform)");
}

std::string_view entry_kind_name(EntryKind kind) {
  switch (kind) {
    case EntryKind::Gaussian:
      return "gaussian";
    case EntryKind::Rademacher:
      return "rademacher";
    case EntryKind::Uniform:
      return "uniform";
  }
  return "gaussian";
}

}  // namespace rfs
