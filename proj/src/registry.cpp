#include "segmeld/registry.hpp"

#include <algorithm>

namespace segmeld {

ClassRegistry::ClassRegistry(std::initializer_list<Entry> entries) {
  for (const auto& e : entries) add(e.id, e.name);
}

void ClassRegistry::add(ClassId id, std::string name) {
  if (id <= 0) throw Error(ErrorCode::InvalidArgument, "class id must be positive, got " + std::to_string(id));
  if (contains(id)) throw Error(ErrorCode::InvalidArgument, "duplicate class id " + std::to_string(id));
  if (find(name)) throw Error(ErrorCode::InvalidArgument, "duplicate class name '" + name + "'");
  entries_.push_back({id, std::move(name)});
}

bool ClassRegistry::contains(ClassId id) const {
  return std::any_of(entries_.begin(), entries_.end(), [id](const Entry& e) { return e.id == id; });
}

const std::string& ClassRegistry::name(ClassId id) const {
  for (const auto& e : entries_) {
    if (e.id == id) return e.name;
  }
  throw Error(ErrorCode::UnknownClass, "class id " + std::to_string(id));
}

std::optional<ClassId> ClassRegistry::find(std::string_view name) const {
  for (const auto& e : entries_) {
    if (e.name == name) return e.id;
  }
  return std::nullopt;
}

ClassSet ClassRegistry::ids() const {
  ClassSet out;
  for (const auto& e : entries_) out.insert(e.id);
  return out;
}

}  // namespace segmeld
