/*
   Copyright 2026 The conewalk Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

        http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#ifndef CONEWALK_ERROR_HPP
#define CONEWALK_ERROR_HPP

#include <stdexcept>
#include <string>

namespace conewalk {

/// Every failure carries a stable kebab-case kind ("singular-angle",
/// "insufficient-moments", ...) that callers and the CLI switch on.
class Error : public std::runtime_error {
   public:
    Error(std::string kind, const std::string& message)
        : std::runtime_error(kind + ": " + message), kind_(std::move(kind)), message_(message) {}

    const std::string& kind() const noexcept { return kind_; }
    const std::string& message() const noexcept { return message_; }

   private:
    std::string kind_;
    std::string message_;
};

}  // namespace conewalk

#endif  // CONEWALK_ERROR_HPP
