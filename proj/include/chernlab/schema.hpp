#pragma once

// JSON Schema (draft-04) validation backed by RapidJSON.

#include <rapidjson/document.h>
#include <rapidjson/error/en.h>
#include <rapidjson/schema.h>
#include <rapidjson/stringbuffer.h>

#include <memory>
#include <optional>
#include <string>

#include "chernlab/errors.hpp"

namespace chernlab {

class JsonSchema {
 public:
  explicit JsonSchema(const char* schema_text) {
    rapidjson::Document sd;
    if (sd.Parse(schema_text).HasParseError())
      fail(ErrorKind::InvalidArgument, std::string("schema does not parse: ") + rapidjson::GetParseError_En(sd.GetParseError()));
    schema_ = std::make_unique<rapidjson::SchemaDocument>(sd);
  }

  /// Returns a description of the first violation, or nothing when `text` is valid.
  std::optional<std::string> check(const std::string& text) const {
    rapidjson::Document doc;
    doc.Parse(text.c_str());
    if (doc.HasParseError())
      return "JSON parse error at offset " + std::to_string(doc.GetErrorOffset()) + ": " +
             rapidjson::GetParseError_En(doc.GetParseError());
    rapidjson::SchemaValidator validator(*schema_);
    if (doc.Accept(validator)) return std::nullopt;
    rapidjson::StringBuffer where, rule;
    validator.GetInvalidDocumentPointer().StringifyUriFragment(where);
    validator.GetInvalidSchemaPointer().StringifyUriFragment(rule);
    std::string at = where.GetString();
    if (at.empty() || at == "#") at = "#/";
    return "value at " + at + " violates '" + validator.GetInvalidSchemaKeyword() + "' (schema " + rule.GetString() + ")";
  }

 private:
  std::unique_ptr<rapidjson::SchemaDocument> schema_;
};

}  // namespace chernlab
