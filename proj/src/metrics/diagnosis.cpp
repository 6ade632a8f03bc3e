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

#include "migate/metrics/diagnosis.hpp"

#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <tuple>

#include "json.hpp"
#include "migate/error.hpp"

namespace migate::metrics {

std::string_view to_string(Category c) { return c == Category::kVD ? "VD" : "VS"; }

std::string_view to_string(Variant v) {
  switch (v) {
    case Variant::kControl: return "control";
    case Variant::kManipulated: return "manipulated";
    case Variant::kNoImage: return "no_image";
  }
  return "?";
}

std::string_view to_string(Prediction p) {
  switch (p) {
    case Prediction::kYes: return "yes";
    case Prediction::kNo: return "no";
    case Prediction::kUncertain: return "uncertain";
  }
  return "?";
}

std::string_view to_string(ErrorClass e) {
  switch (e) {
    case ErrorClass::kLanguageInduced: return "LI";
    case ErrorClass::kVisualInduced: return "VI";
    case ErrorClass::kMixed: return "Mixed";
  }
  return "?";
}

bool ResponseRecord::correct() const {
  return (prediction == Prediction::kYes && ground_truth == Answer::kYes) ||
         (prediction == Prediction::kNo && ground_truth == Answer::kNo);
}

namespace {

template <typename E>
E parse_enum(const nlohmann::json& row, const char* key,
             std::initializer_list<std::pair<std::string_view, E>> names) {
  const auto text = row.at(key).get<std::string>();
  for (const auto& [name, value] : names) {
    if (text == name) return value;
  }
  throw SchemaError(std::string("unknown ") + key + " '" + text + "'");
}

}  // namespace

std::vector<ResponseRecord> read_response_log(std::istream& in) {
  std::vector<ResponseRecord> log;
  std::set<std::tuple<std::string, std::string, Variant>> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto where = "response log line " + std::to_string(line_no) + ": ";
    ResponseRecord r;
    try {
      const auto row = nlohmann::json::parse(line);
      r.figure_id = row.at("figure_id").get<std::string>();
      r.question_id = row.at("question_id").get<std::string>();
      r.category = parse_enum<Category>(row, "category",
                                        {{"VD", Category::kVD}, {"VS", Category::kVS}});
      r.variant = parse_enum<Variant>(row, "variant",
                                      {{"control", Variant::kControl},
                                       {"manipulated", Variant::kManipulated},
                                       {"no_image", Variant::kNoImage}});
      r.ground_truth =
          parse_enum<Answer>(row, "ground_truth", {{"yes", Answer::kYes}, {"no", Answer::kNo}});
      r.prediction = parse_enum<Prediction>(row, "prediction",
                                            {{"yes", Prediction::kYes},
                                             {"no", Prediction::kNo},
                                             {"uncertain", Prediction::kUncertain}});
    } catch (const nlohmann::json::exception& e) {
      throw SchemaError(where + e.what());
    } catch (const SchemaError& e) {
      throw SchemaError(where + e.what());
    }
    if (!seen.emplace(r.figure_id, r.question_id, r.variant).second) {
      throw SchemaError(where + "duplicate response for " + r.figure_id + "/" + r.question_id +
                        "/" + std::string(to_string(r.variant)));
    }
    log.push_back(std::move(r));
  }
  return log;
}

void write_response_log(const std::vector<ResponseRecord>& log, std::ostream& out) {
  for (const auto& r : log) {
    nlohmann::ordered_json row;
    row["figure_id"] = r.figure_id;
    row["question_id"] = r.question_id;
    row["category"] = to_string(r.category);
    row["variant"] = to_string(r.variant);
    row["ground_truth"] = r.ground_truth == Answer::kYes ? "yes" : "no";
    row["prediction"] = to_string(r.prediction);
    out << row.dump() << '\n';
  }
  if (!out) throw IoError("failed writing response log");
}

namespace {

struct Question {
  Category category;
  std::map<Variant, const ResponseRecord*> variants;
};

const ResponseRecord& require(const Question& q, Variant v, const std::string& name) {
  const auto it = q.variants.find(v);
  if (it == q.variants.end()) {
    throw SchemaError("question " + name + " (" + std::string(to_string(q.category)) +
                      ") lacks the " + std::string(to_string(v)) + " variant");
  }
  return *it->second;
}

ErrorClass classify_vs(const Question& q, const std::string& name, bool& degraded) {
  const auto& no_image = require(q, Variant::kNoImage, name);
  const auto& manipulated = require(q, Variant::kManipulated, name);
  const auto control = q.variants.find(Variant::kControl);
  degraded = control == q.variants.end();
  if (!no_image.correct()) return ErrorClass::kLanguageInduced;
  if (!manipulated.correct()) {
    if (manipulated.prediction == no_image.prediction) return ErrorClass::kLanguageInduced;
    if (degraded || control->second->correct()) return ErrorClass::kVisualInduced;
  }
  return ErrorClass::kMixed;
}

ErrorClass classify_vd(const Question& q, const std::string& name, bool& degraded) {
  const auto& control = require(q, Variant::kControl, name);
  const auto& manipulated = require(q, Variant::kManipulated, name);
  degraded = false;
  if (!control.correct() || !manipulated.correct()) return ErrorClass::kVisualInduced;
  return ErrorClass::kMixed;
}

}  // namespace

DiagnosisReport classify_errors(const std::vector<ResponseRecord>& log) {
  if (log.empty()) throw SchemaError("response log is empty");
  std::map<std::pair<std::string, std::string>, Question> questions;
  std::size_t correct_responses = 0;
  for (const auto& r : log) {
    auto [it, fresh] = questions.try_emplace({r.figure_id, r.question_id}, Question{r.category, {}});
    if (!fresh && it->second.category != r.category) {
      throw SchemaError("question " + r.figure_id + "/" + r.question_id +
                        " mixes VD and VS responses");
    }
    if (!it->second.variants.emplace(r.variant, &r).second) {
      throw SchemaError("duplicate response for " + r.figure_id + "/" + r.question_id + "/" +
                        std::string(to_string(r.variant)));
    }
    correct_responses += r.correct();
  }

  DiagnosisReport report;
  report.responses = log.size();
  report.questions = questions.size();
  report.accuracy = static_cast<double>(correct_responses) / static_cast<double>(log.size());
  report.consistency = consistency(log);
  for (const auto& [key, q] : questions) {
    QuestionDiagnosis d{key.first, key.second, q.category, true, std::nullopt, false};
    const std::string name = key.first + "/" + key.second;
    bool degraded = false;
    // Required variants are checked even for fully correct questions.
    const ErrorClass cls = q.category == Category::kVS ? classify_vs(q, name, degraded)
                                                       : classify_vd(q, name, degraded);
    d.degraded = degraded;
    for (const auto& [variant, record] : q.variants) d.correct = d.correct && record->correct();
    if (!d.correct) {
      d.error = cls;
      ++report.incorrect_questions;
      switch (cls) {
        case ErrorClass::kLanguageInduced: ++report.language_induced; break;
        case ErrorClass::kVisualInduced: ++report.visual_induced; break;
        case ErrorClass::kMixed: ++report.mixed; break;
      }
    }
    report.details.push_back(std::move(d));
  }
  return report;
}

double consistency(const std::vector<ResponseRecord>& log) {
  if (log.empty()) throw SchemaError("response log is empty");
  std::map<std::string, bool> figures;
  for (const auto& r : log) {
    auto [it, fresh] = figures.try_emplace(r.figure_id, true);
    it->second = it->second && r.correct();
  }
  std::size_t consistent = 0;
  for (const auto& [figure, ok] : figures) consistent += ok;
  return static_cast<double>(consistent) / static_cast<double>(figures.size());
}

std::string diagnosis_to_json(const DiagnosisReport& report) {
  nlohmann::ordered_json doc;
  doc["LI"] = report.language_induced;
  doc["VI"] = report.visual_induced;
  doc["Mixed"] = report.mixed;
  doc["incorrect_questions"] = report.incorrect_questions;
  doc["questions"] = report.questions;
  doc["responses"] = report.responses;
  doc["accuracy"] = report.accuracy;
  doc["consistency"] = report.consistency;
  auto& rows = doc["questions_detail"] = nlohmann::ordered_json::array();
  std::size_t degraded = 0;
  for (const auto& d : report.details) {
    nlohmann::ordered_json row;
    row["figure_id"] = d.figure_id;
    row["question_id"] = d.question_id;
    row["category"] = to_string(d.category);
    row["correct"] = d.correct;
    row["error"] = d.error ? nlohmann::ordered_json(to_string(*d.error)) : nullptr;
    row["degraded"] = d.degraded;
    degraded += d.degraded;
    rows.push_back(std::move(row));
  }
  doc["degraded_questions"] = degraded;
  return doc.dump(2);
}

}  // namespace migate::metrics
