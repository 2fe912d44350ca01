// Copyright 2026 The absa Authors.
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

#ifndef ABSA_DATA_H_
#define ABSA_DATA_H_

#include <string_view>

namespace absa {

// Contents of the data files shipped under data/, compiled into the library.
std::string_view bundled_stopwords();
std::string_view bundled_lemmas();
std::string_view bundled_cuisine_aliases();
std::string_view bundled_aspect_aliases();

}  // namespace absa

#endif  // ABSA_DATA_H_
