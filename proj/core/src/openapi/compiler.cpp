#include "sbilint/openapi/compiler.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <sstream>

#include <openssl/evp.h>

namespace sbilint::openapi {

namespace {

const std::set<std::string> kMethods{"get", "put", "post", "delete", "patch", "head", "options", "trace"};
const std::set<std::string> kKnownFormats{"int32", "int64", "float", "double", "date-time", "uuid", "byte"};

std::string escape_pointer_token(std::string_view token) {
  std::string out;
  for (char c : token) {
    if (c == '~') {
      out += "~0";
    } else if (c == '/') {
      out += "~1";
    } else {
      out += c;
    }
  }
  return out;
}

std::string to_lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
  return out;
}

std::string to_upper(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::toupper(c); });
  return out;
}

std::string sha256_hex(const std::vector<SourceFile>& files) {
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
  for (const auto& f : files) {
    EVP_DigestUpdate(ctx, f.file_name.data(), f.file_name.size());
    EVP_DigestUpdate(ctx, "\0", 1);
    const std::string size = std::to_string(f.text.size());
    EVP_DigestUpdate(ctx, size.data(), size.size());
    EVP_DigestUpdate(ctx, "\0", 1);
    EVP_DigestUpdate(ctx, f.text.data(), f.text.size());
  }
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx, digest, &len);
  EVP_MD_CTX_free(ctx);
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += kHex[digest[i] >> 4];
    out += kHex[digest[i] & 0xf];
  }
  return out;
}

std::optional<std::uint64_t> get_count(const nlohmann::json& node, const char* key) {
  auto it = node.find(key);
  if (it == node.end() || !it->is_number()) return std::nullopt;
  if (it->is_number_unsigned() || it->is_number_integer()) {
    auto v = it->get<std::int64_t>();
    return v < 0 ? 0 : static_cast<std::uint64_t>(v);
  }
  return static_cast<std::uint64_t>(std::max(0.0, it->get<double>()));
}

std::optional<double> get_number(const nlohmann::json& node, const char* key) {
  auto it = node.find(key);
  if (it == node.end() || !it->is_number()) return std::nullopt;
  return it->get<double>();
}

bool get_bool(const nlohmann::json& node, const char* key) {
  auto it = node.find(key);
  return it != node.end() && it->is_boolean() && it->get<bool>();
}

bool has_any(const nlohmann::json& node, std::initializer_list<const char*> keys) {
  return std::any_of(keys.begin(), keys.end(), [&](const char* k) { return node.contains(k); });
}

std::string file_part(std::string_view ref) {
  auto hash = ref.find('#');
  std::string file(ref.substr(0, hash));
  auto slash = file.find_last_of('/');
  if (slash != std::string::npos) file = file.substr(slash + 1);
  return file;
}

/// "{apiRoot}/nnrf-nfm/v1" or "https://host/nnrf-nfm/v1" -> "/nnrf-nfm/v1".
std::string base_path_from_url(std::string url) {
  while (!url.empty() && url.front() == '{') {
    auto close = url.find('}');
    if (close == std::string::npos) break;
    url = url.substr(close + 1);
  }
  auto scheme = url.find("://");
  if (scheme != std::string::npos) {
    auto path_start = url.find('/', scheme + 3);
    url = path_start == std::string::npos ? "/" : url.substr(path_start);
  }
  while (url.size() > 1 && url.back() == '/') url.pop_back();
  return url;
}

std::vector<std::string> split_segments(std::string_view path) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (pos < path.size()) {
    if (path[pos] == '/') ++pos;
    auto next = path.find('/', pos);
    out.emplace_back(path.substr(pos, next == std::string_view::npos ? std::string_view::npos : next - pos));
    if (next == std::string_view::npos) break;
    pos = next;
  }
  return out;
}

bool is_version_segment(std::string_view s) {
  return s.size() >= 2 && s[0] == 'v' &&
         std::all_of(s.begin() + 1, s.end(), [](unsigned char c) { return std::isdigit(c); });
}

}  // namespace

std::string_view to_string(SchemaKind kind) {
  switch (kind) {
    case SchemaKind::String: return "string";
    case SchemaKind::Number: return "number";
    case SchemaKind::Integer: return "integer";
    case SchemaKind::Boolean: return "boolean";
    case SchemaKind::Array: return "array";
    case SchemaKind::Object: return "object";
    case SchemaKind::Composite: return "composite";
    case SchemaKind::Any: return "any";
  }
  return "any";
}

CorpusCompiler::CorpusCompiler(std::vector<SourceFile> files) {
  std::sort(files.begin(), files.end(),
            [](const SourceFile& a, const SourceFile& b) { return a.file_name < b.file_name; });
  digest_ = sha256_hex(files);

  for (const auto& file : files) {
    std::vector<std::string> warnings;
    nlohmann::json root;
    try {
      root = yaml_to_json(file.text, warnings);
    } catch (const std::exception& e) {
      note(file.file_name + ": skipped, YAML parse failure: " + e.what());
      continue;
    }
    for (const auto& w : warnings) note(file.file_name + ": " + w);
    if (!root.is_object() || !root.contains("openapi")) {
      note(file.file_name + ": skipped, no top-level 'openapi' key");
      continue;
    }

    SpecDocument doc;
    doc.file_name = file.file_name;
    doc.root = std::move(root);
    auto servers = doc.root.find("servers");
    if (servers != doc.root.end() && servers->is_array() && !servers->empty() &&
        (*servers)[0].contains("url") && (*servers)[0]["url"].is_string()) {
      doc.base_path = base_path_from_url((*servers)[0]["url"].get<std::string>());
      auto segments = split_segments(doc.base_path);
      if (!segments.empty()) doc.api_name = segments.front();
      for (const auto& s : segments) {
        if (is_version_segment(s)) doc.api_version = s;
      }
    }
    documents_.emplace(doc.file_name, std::move(doc));
  }

  if (documents_.empty()) {
    throw SpecError(SpecError::Kind::EmptyCorpus, "no valid OpenAPI document found in corpus");
  }
}

void CorpusCompiler::note(std::string text) {
  if (noted_.insert(text).second) notes_.push_back(std::move(text));
}

CorpusCompiler::Located CorpusCompiler::locate(std::string_view ref_text, std::string_view current_doc,
                                               std::string_view from) const {
  const auto hash = ref_text.find('#');
  std::string file = file_part(ref_text);
  if (file.empty()) file = std::string(current_doc);
  auto doc_it = documents_.find(file);
  if (doc_it == documents_.end()) {
    throw SpecError(SpecError::Kind::UnresolvableRef,
                    "unresolvable reference '" + std::string(ref_text) + "': document not in corpus",
                    std::string(from));
  }
  std::string pointer = hash == std::string_view::npos ? "" : std::string(ref_text.substr(hash + 1));
  const nlohmann::json* node = &doc_it->second.root;
  try {
    if (!pointer.empty()) node = &doc_it->second.root.at(nlohmann::json::json_pointer(pointer));
  } catch (const nlohmann::json::exception&) {
    throw SpecError(SpecError::Kind::UnresolvableRef,
                    "unresolvable reference '" + std::string(ref_text) + "'", std::string(from));
  }
  return Located{&doc_it->second, node, pointer};
}

const Schema& CorpusCompiler::resolve_ref(std::string_view ref_text, std::string_view current_doc) {
  return *compile_at(locate(ref_text, current_doc, std::string(current_doc) + "#"));
}

const Schema& CorpusCompiler::compile_schema(const nlohmann::json& node, std::string_view doc,
                                             const std::string& pointer) {
  auto it = documents_.find(std::string(doc));
  if (it == documents_.end()) {
    throw SpecError(SpecError::Kind::UnresolvableRef, "unknown document '" + std::string(doc) + "'");
  }
  return *compile_node(node, it->second, pointer);
}

const Schema* CorpusCompiler::compile_at(const Located& where) {
  // Follow a chain of pure references to its first non-reference node. Every
  // location on the chain maps to the same compiled node.
  std::vector<std::string> chain;
  Located current = where;
  while (true) {
    std::string key = current.doc->file_name + "#" + current.pointer;
    if (auto hit = memo_.find(key); hit != memo_.end()) {
      for (const auto& k : chain) memo_[k] = hit->second;
      return hit->second;
    }
    if (std::find(chain.begin(), chain.end(), key) != chain.end()) {
      note("reference cycle without content at " + key + "; treated as an unconstrained schema");
      Schema* any = arena_->make();
      any->source = key;
      for (const auto& k : chain) memo_[k] = any;
      return any;
    }
    chain.push_back(key);
    if (current.node->is_object() && current.node->contains("$ref") && (*current.node)["$ref"].is_string()) {
      current = locate((*current.node)["$ref"].get<std::string>(), current.doc->file_name, key);
      continue;
    }
    break;
  }

  Schema* out = arena_->make();
  out->source = chain.back();
  for (const auto& k : chain) memo_[k] = out;
  fill(*out, *current.node, *current.doc, current.pointer);
  return out;
}

const Schema* CorpusCompiler::compile_node(const nlohmann::json& node, const SpecDocument& doc,
                                           const std::string& pointer) {
  return compile_at(Located{&doc, &node, pointer});
}

void CorpusCompiler::fill(Schema& out, const nlohmann::json& node, const SpecDocument& doc,
                          const std::string& pointer) {
  if (!node.is_object()) {
    if (!(node.is_boolean() && node.get<bool>())) {
      note(doc.file_name + "#" + pointer + ": schema is not an object; treated as unconstrained");
    }
    return;
  }
  auto child_ptr = [&](std::initializer_list<std::string_view> tokens) {
    std::string p = pointer;
    for (auto t : tokens) p += "/" + escape_pointer_token(t);
    return p;
  };

  out.nullable = get_bool(node, "nullable");

  const bool composite = has_any(node, {"oneOf", "anyOf", "allOf", "not"});
  if (composite) {
    out.kind = SchemaKind::Composite;
    CompositeGroup group;
    auto compile_list = [&](const char* key, std::vector<const Schema*>& into) {
      auto it = node.find(key);
      if (it == node.end() || !it->is_array()) return;
      for (std::size_t i = 0; i < it->size(); ++i) {
        into.push_back(compile_node((*it)[i], doc, child_ptr({key, std::to_string(i)})));
      }
    };
    compile_list("oneOf", group.one_of);
    compile_list("anyOf", group.any_of);
    compile_list("allOf", group.all_of);
    if (auto it = node.find("not"); it != node.end()) {
      group.not_schema = compile_node(*it, doc, child_ptr({"not"}));
    }

    if (auto it = node.find("discriminator"); it != node.end() && it->is_object()) {
      if (group.one_of.empty()) {
        note(doc.file_name + "#" + pointer + ": discriminator outside oneOf is ignored");
      } else {
        Discriminator disc;
        disc.property_name = it->value("propertyName", "");
        if (disc.property_name.empty()) {
          note(doc.file_name + "#" + pointer + ": discriminator without propertyName is ignored");
        } else {
          const auto& branches = node["oneOf"];
          for (std::size_t i = 0; i < branches.size(); ++i) {
            if (branches[i].contains("$ref") && branches[i]["$ref"].is_string()) {
              std::string ref = branches[i]["$ref"].get<std::string>();
              disc.mapping.emplace(ref.substr(ref.find_last_of('/') + 1), group.one_of[i]);
            }
          }
          if (auto m = it->find("mapping"); m != it->end() && m->is_object()) {
            for (const auto& [value, target] : m->items()) {
              if (!target.is_string()) continue;
              std::string ref = target.get<std::string>();
              if (ref.find('#') == std::string::npos && ref.find('/') == std::string::npos) {
                ref = "#/components/schemas/" + ref;
              }
              disc.mapping[value] = compile_at(locate(ref, doc.file_name, child_ptr({"discriminator", "mapping", value})));
            }
          }
          group.discriminator = std::move(disc);
        }
      }
    }

    nlohmann::json rest = node;
    for (const char* k : {"oneOf", "anyOf", "allOf", "not", "discriminator", "nullable", "description",
                          "example", "default", "readOnly", "writeOnly", "title", "deprecated", "externalDocs"}) {
      rest.erase(k);
    }
    if (!rest.empty()) {
      Schema* base = arena_->make();
      base->source = doc.file_name + "#" + pointer + "(base)";
      fill(*base, rest, doc, pointer);
      group.base = base;
    }
    out.composite = std::move(group);
    return;
  }

  std::string type;
  if (auto it = node.find("type"); it != node.end() && it->is_string()) type = it->get<std::string>();
  if (type == "string") out.kind = SchemaKind::String;
  else if (type == "number") out.kind = SchemaKind::Number;
  else if (type == "integer") out.kind = SchemaKind::Integer;
  else if (type == "boolean") out.kind = SchemaKind::Boolean;
  else if (type == "array") out.kind = SchemaKind::Array;
  else if (type == "object") out.kind = SchemaKind::Object;
  else if (!type.empty()) note(doc.file_name + "#" + pointer + ": unknown type '" + type + "' treated as unconstrained");

  if (auto it = node.find("pattern"); it != node.end() && it->is_string()) {
    std::string text = it->get<std::string>();
    auto& cached = regex_cache_[text];
    if (!cached) {
      try {
        cached = std::make_shared<const std::regex>(text, std::regex::ECMAScript);
      } catch (const std::regex_error& e) {
        note(doc.file_name + "#" + pointer + ": pattern '" + text + "' not supported (" + e.what() + "); ignored");
      }
    }
    if (cached) out.pattern = Pattern{text, cached};
  }
  out.minimum = get_number(node, "minimum");
  out.maximum = get_number(node, "maximum");
  out.exclusive_minimum = get_bool(node, "exclusiveMinimum");
  out.exclusive_maximum = get_bool(node, "exclusiveMaximum");
  out.min_length = get_count(node, "minLength");
  out.max_length = get_count(node, "maxLength");
  out.min_items = get_count(node, "minItems");
  out.max_items = get_count(node, "maxItems");
  out.unique_items = get_bool(node, "uniqueItems");
  out.min_properties = get_count(node, "minProperties");
  out.max_properties = get_count(node, "maxProperties");
  if (auto it = node.find("enum"); it != node.end() && it->is_array()) {
    out.enum_values = std::vector<nlohmann::json>(it->begin(), it->end());
  }
  if (auto it = node.find("format"); it != node.end() && it->is_string()) {
    out.format = it->get<std::string>();
    if (!kKnownFormats.count(out.format) && unvalidated_formats_.insert(out.format).second) {
      note("format '" + out.format + "' is not validated (first seen at " + doc.file_name + "#" + pointer + ")");
    }
  }

  const bool object_keywords =
      has_any(node, {"properties", "required", "additionalProperties", "minProperties", "maxProperties"});
  const bool array_keywords = node.contains("items");

  if (out.kind == SchemaKind::Object || (out.kind == SchemaKind::Any && object_keywords)) {
    if (out.kind == SchemaKind::Any && array_keywords) {
      note(doc.file_name + "#" + pointer + ": untyped schema mixes object and array keywords; items ignored");
    }
    ObjectFields fields;
    if (auto it = node.find("properties"); it != node.end() && it->is_object()) {
      for (const auto& [name, sub] : it->items()) {
        fields.properties.emplace(name, compile_node(sub, doc, child_ptr({"properties", name})));
      }
    }
    if (auto it = node.find("required"); it != node.end() && it->is_array()) {
      for (const auto& r : *it) {
        if (r.is_string()) fields.required.insert(r.get<std::string>());
      }
    }
    if (auto it = node.find("additionalProperties"); it != node.end()) {
      if (it->is_boolean()) {
        fields.additional.allowed = it->get<bool>();
      } else if (it->is_object()) {
        fields.additional.schema = compile_node(*it, doc, child_ptr({"additionalProperties"}));
      }
    }
    out.object_fields = std::move(fields);
  } else if (out.kind == SchemaKind::Array || (out.kind == SchemaKind::Any && array_keywords)) {
    if (auto it = node.find("items"); it != node.end()) {
      out.array_items = compile_node(*it, doc, child_ptr({"items"}));
    }
  }
}

const nlohmann::json& CorpusCompiler::follow_refs(const nlohmann::json& node, const SpecDocument*& doc,
                                                  std::string& pointer) {
  const nlohmann::json* current = &node;
  for (int hops = 0; current->is_object() && current->contains("$ref"); ++hops) {
    if (hops > 32) {
      throw SpecError(SpecError::Kind::UnresolvableRef, "reference chain too long", doc->file_name + "#" + pointer);
    }
    auto loc = locate((*current)["$ref"].get<std::string>(), doc->file_name, doc->file_name + "#" + pointer);
    doc = loc.doc;
    pointer = loc.pointer;
    current = loc.node;
  }
  return *current;
}

namespace {

struct OperationContext {
  std::string api_name;
  std::string api_version;
  std::string path_template;
};

}  // namespace

SpecIndex CorpusCompiler::build_index() && {
  SpecIndex index;
  std::map<std::pair<std::string, std::string>, IndexEntry> entries;

  auto content_map = [&](const nlohmann::json& content, const SpecDocument& doc, const std::string& pointer) {
    ContentMap out;
    if (!content.is_object()) return out;
    for (const auto& [media, body] : content.items()) {
      std::string media_ptr = pointer + "/" + escape_pointer_token(media);
      const Schema* schema = nullptr;
      if (body.is_object() && body.contains("schema")) {
        schema = compile_node(body["schema"], doc, media_ptr + "/schema");
      } else {
        Schema* any = arena_->make();
        any->source = doc.file_name + "#" + media_ptr;
        schema = any;
      }
      out.emplace(to_lower(media), schema);
    }
    return out;
  };

  // Compiles one operation object; recursion handles callback operations.
  std::function<std::shared_ptr<OperationSpec>(const nlohmann::json&, const SpecDocument&, const std::string&,
                                               const std::string&, const OperationContext&)>
      compile_operation;
  compile_operation = [&](const nlohmann::json& op, const SpecDocument& doc, const std::string& pointer,
                          const std::string& method, const OperationContext& ctx) {
    auto spec = std::make_shared<OperationSpec>();
    spec->method = to_upper(method);
    spec->operation_id = op.value("operationId", spec->method + " " + ctx.path_template);
    spec->api_name = ctx.api_name;
    spec->api_version = ctx.api_version;
    spec->path_template = ctx.path_template;
    spec->document = doc.file_name;

    if (auto it = op.find("requestBody"); it != op.end()) {
      const SpecDocument* body_doc = &doc;
      std::string body_ptr = pointer + "/requestBody";
      const auto& body = follow_refs(*it, body_doc, body_ptr);
      if (body.contains("content")) {
        spec->request_body = content_map(body["content"], *body_doc, body_ptr + "/content");
      }
    }

    if (auto it = op.find("responses"); it != op.end() && it->is_object()) {
      for (const auto& [code, raw] : it->items()) {
        const SpecDocument* resp_doc = &doc;
        std::string resp_ptr = pointer + "/responses/" + escape_pointer_token(code);
        const auto& resp = follow_refs(raw, resp_doc, resp_ptr);
        ResponseSpec rs;
        if (resp.contains("content")) rs.content = content_map(resp["content"], *resp_doc, resp_ptr + "/content");
        if (auto h = resp.find("headers"); h != resp.end() && h->is_object()) {
          for (const auto& [name, raw_header] : h->items()) {
            const SpecDocument* h_doc = resp_doc;
            std::string h_ptr = resp_ptr + "/headers/" + escape_pointer_token(name);
            const auto& header = follow_refs(raw_header, h_doc, h_ptr);
            if (get_bool(header, "required")) rs.required_headers.push_back(to_lower(name));
          }
        }
        spec->responses.emplace(to_upper(code) == "DEFAULT" ? "default" : to_upper(code), std::move(rs));
      }
    }
    if (spec->responses.empty()) {
      note(doc.file_name + "#" + pointer + ": operation declares no responses");
      spec->responses.emplace("default", ResponseSpec{});
    }

    if (auto it = op.find("callbacks"); it != op.end() && it->is_object() && !it->empty()) {
      spec->callbacks_present = true;
      for (const auto& [cb_name, raw_cb] : it->items()) {
        const SpecDocument* cb_doc = &doc;
        std::string cb_ptr = pointer + "/callbacks/" + escape_pointer_token(cb_name);
        const auto& cb = follow_refs(raw_cb, cb_doc, cb_ptr);
        if (!cb.is_object()) continue;
        for (const auto& [expression, raw_item] : cb.items()) {
          const SpecDocument* item_doc = cb_doc;
          std::string item_ptr = cb_ptr + "/" + escape_pointer_token(expression);
          const auto& item = follow_refs(raw_item, item_doc, item_ptr);
          if (!item.is_object()) continue;
          for (const auto& [cb_method, cb_op] : item.items()) {
            if (!kMethods.count(cb_method)) continue;
            OperationContext cb_ctx{ctx.api_name, ctx.api_version, expression};
            spec->callbacks.push_back(compile_operation(cb_op, *item_doc, item_ptr + "/" + cb_method, cb_method, cb_ctx));
          }
        }
      }
    }
    return spec;
  };

  for (const auto& [file, doc] : documents_) {
    auto paths = doc.root.find("paths");
    if (paths == doc.root.end() || !paths->is_object() || paths->empty()) continue;
    if (doc.base_path.empty() || doc.api_name.empty() || doc.api_version.empty()) {
      note(file + ": paths skipped, server URL does not yield '/<api-name>/<version>'");
      continue;
    }
    auto& known = index.versions_[doc.api_name];
    if (known.empty()) {
      known = doc.api_version;
    } else if (known != doc.api_version) {
      note("API " + doc.api_name + " declared at both " + known + " and " + doc.api_version +
           "; only one version per API is supported, keeping " + std::max(known, doc.api_version));
      known = std::max(known, doc.api_version);
    }

    for (const auto& [tmpl, raw_item] : paths->items()) {
      const SpecDocument* item_doc = &doc;
      std::string item_ptr = "/paths/" + escape_pointer_token(tmpl);
      const auto& item = follow_refs(raw_item, item_doc, item_ptr);
      if (!item.is_object()) continue;

      // Path-level parameters first, then any operation-level path parameter
      // not declared at path level.
      std::map<std::string, const Schema*> path_params;
      auto collect_params = [&](const nlohmann::json& params, const SpecDocument& pdoc, const std::string& pptr) {
        if (!params.is_array()) return;
        for (std::size_t i = 0; i < params.size(); ++i) {
          const SpecDocument* p_doc = &pdoc;
          std::string p_ptr = pptr + "/" + std::to_string(i);
          const auto& param = follow_refs(params[i], p_doc, p_ptr);
          if (param.value("in", "") != "path" || !param.contains("name")) continue;
          std::string name = param["name"].get<std::string>();
          if (path_params.count(name)) continue;
          path_params[name] = param.contains("schema") ? compile_node(param["schema"], *p_doc, p_ptr + "/schema")
                                                       : nullptr;
        }
      };
      if (item.contains("parameters")) collect_params(item["parameters"], *item_doc, item_ptr + "/parameters");
      for (const auto& [method, op] : item.items()) {
        if (kMethods.count(method) && op.contains("parameters")) {
          collect_params(op["parameters"], *item_doc, item_ptr + "/" + method + "/parameters");
        }
      }

      auto key = std::make_pair(doc.base_path, tmpl);
      auto entry_it = entries.find(key);
      if (entry_it == entries.end()) {
        IndexEntry entry;
        entry.base_path = doc.base_path;
        entry.matcher = compile_path_template(tmpl, path_params);
        entry_it = entries.emplace(key, std::move(entry)).first;
      }
      OperationContext ctx{doc.api_name, doc.api_version, tmpl};
      for (const auto& [method, op] : item.items()) {
        if (!kMethods.count(method) || !op.is_object()) continue;
        auto spec = compile_operation(op, *item_doc, item_ptr + "/" + method, method, ctx);
        entry_it->second.operations[spec->method] = std::move(spec);
      }
    }
  }

  for (auto& [_, entry] : entries) index.entries_.push_back(std::move(entry));
  index.notes_ = std::move(notes_);
  index.digest_ = std::move(digest_);
  index.arena_ = std::move(arena_);
  return index;
}

SpecIndex compile_corpus(std::vector<SourceFile> files) {
  return CorpusCompiler(std::move(files)).build_index();
}

SpecIndex load_spec_dir(const std::filesystem::path& directory) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(directory)) {
    throw SpecError(SpecError::Kind::EmptyCorpus, "spec directory '" + directory.string() + "' does not exist");
  }
  std::vector<SourceFile> files;
  for (const auto& entry : fs::directory_iterator(directory)) {
    if (!entry.is_regular_file()) continue;
    auto ext = entry.path().extension().string();
    if (ext != ".yaml" && ext != ".yml") continue;
    std::ifstream in(entry.path(), std::ios::binary);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    files.push_back(SourceFile{entry.path().filename().string(), buffer.str()});
  }
  return compile_corpus(std::move(files));
}

}  // namespace sbilint::openapi
