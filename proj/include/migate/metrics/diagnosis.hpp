//
// Copyright 2026 The migate Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace migate::metrics {

enum class Category { kVD, kVS };
enum class Variant { kControl, kManipulated, kNoImage };
enum class Answer { kYes, kNo };
enum class Prediction { kYes, kNo, kUncertain };

std::string_view to_string(Category c);
std::string_view to_string(Variant v);
std::string_view to_string(Prediction p);

struct ResponseRecord {
  std::string figure_id;
  std::string question_id;
  Category category = Category::kVS;
  Variant variant = Variant::kControl;
  Answer ground_truth = Answer::kYes;
  Prediction prediction = Prediction::kUncertain;

  // Uncertain never matches the ground truth.
  bool correct() const;

  friend bool operator==(const ResponseRecord&, const ResponseRecord&) = default;
};

// JSONL rows with the ResponseRecord field names and lower-case enum values
// ("VD"/"VS" for the category). Duplicated (figure, question, variant)
// triples and malformed rows raise SchemaError.
std::vector<ResponseRecord> read_response_log(std::istream& in);
void write_response_log(const std::vector<ResponseRecord>& log, std::ostream& out);

enum class ErrorClass { kLanguageInduced, kVisualInduced, kMixed };

std::string_view to_string(ErrorClass e);

struct QuestionDiagnosis {
  std::string figure_id;
  std::string question_id;
  Category category = Category::kVS;
  bool correct = true;
  std::optional<ErrorClass> error;  // set exactly when !correct
  bool degraded = false;            // graded without an optional variant
};

struct DiagnosisReport {
  std::size_t language_induced = 0;
  std::size_t visual_induced = 0;
  std::size_t mixed = 0;
  std::size_t incorrect_questions = 0;
  std::size_t questions = 0;
  std::size_t responses = 0;
  double accuracy = 0.0;     // correct responses / responses
  double consistency = 0.0;  // figures with every response correct / figures
  std::vector<QuestionDiagnosis> details;  // sorted by (figure, question)
};

// Questions are keyed by (figure_id, question_id). VS questions need the
// no_image and manipulated variants, VD questions need control and
// manipulated; a missing one raises SchemaError naming the question.
DiagnosisReport classify_errors(const std::vector<ResponseRecord>& log);

// Fraction of figure ids whose every response is correct. SchemaError on an
// empty log.
double consistency(const std::vector<ResponseRecord>& log);

std::string diagnosis_to_json(const DiagnosisReport& report);

}  // namespace migate::metrics
