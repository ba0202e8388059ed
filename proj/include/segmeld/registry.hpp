#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "segmeld/raster.hpp"

namespace segmeld {

/// Ordered (id, name) table. Ids are positive and unique; names are unique.
class ClassRegistry {
 public:
  struct Entry {
    ClassId id;
    std::string name;
    bool operator==(const Entry&) const = default;
  };

  ClassRegistry() = default;
  ClassRegistry(std::initializer_list<Entry> entries);

  /// InvalidArgument on id <= 0, a duplicate id or a duplicate name.
  void add(ClassId id, std::string name);

  bool contains(ClassId id) const;
  /// UnknownClass if the id is not registered.
  const std::string& name(ClassId id) const;
  std::optional<ClassId> find(std::string_view name) const;

  const std::vector<Entry>& entries() const { return entries_; }
  ClassSet ids() const;
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

  bool operator==(const ClassRegistry&) const = default;

 private:
  std::vector<Entry> entries_;
};

}  // namespace segmeld
