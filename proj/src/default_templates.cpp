#include "sscc/templates.hpp"

namespace sscc {

std::string_view default_templates_json() {
  static constexpr std::string_view kJson = R"json([
  {
    "id": "range_within_km",
    "query_type": "range",
    "nl": "Which {subject} are within {distance} of {reference}?",
    "exe": "query {subject} feed filter[distance(.geom, ref({reference})) < {distance}] consume",
    "distance_unit": "km",
    "slots": [
      {"name": "subject", "kind": "table", "role": "subject", "geometry_constraint": "any"},
      {"name": "reference", "kind": "entity", "role": "object", "geometry_constraint": "any"},
      {"name": "distance", "kind": "distance", "unit": "km"}
    ]
  },
  {
    "id": "range_less_than_m",
    "query_type": "range",
    "nl": "List the {subject} less than {distance} away from {reference}.",
    "exe": "query {subject} feed filter[distance(.geom, ref({reference})) < {distance}] consume",
    "distance_unit": "m",
    "slots": [
      {"name": "subject", "kind": "table", "role": "subject", "geometry_constraint": "any"},
      {"name": "reference", "kind": "entity", "role": "object", "geometry_constraint": "any"},
      {"name": "distance", "kind": "distance", "unit": "m"}
    ]
  },
  {
    "id": "range_containment",
    "query_type": "range",
    "nl": "Which {subject} are {operator} {reference}?",
    "exe": "query {subject} feed filter[.geom {operator} ref({reference})] consume",
    "distance_unit": "m",
    "slots": [
      {"name": "subject", "kind": "table", "role": "subject", "geometry_constraint": "any"},
      {"name": "operator", "kind": "operator"},
      {"name": "reference", "kind": "entity", "role": "object", "geometry_constraint": "any"}
    ]
  },
  {
    "id": "knn_nearest",
    "query_type": "knn",
    "nl": "What are the {k} nearest {subject} to {anchor}?",
    "exe": "query {subject} feed distancescan[{anchor}, {k}] consume",
    "distance_unit": "m",
    "slots": [
      {"name": "subject", "kind": "table", "role": "subject", "geometry_constraint": "any"},
      {"name": "anchor", "kind": "entity", "role": "object", "geometry_constraint": "point", "render": "point"},
      {"name": "k", "kind": "count"}
    ]
  },
  {
    "id": "knn_closest",
    "query_type": "knn",
    "nl": "Find the {k} {subject} closest to {anchor}.",
    "exe": "query {subject} feed distancescan[{anchor}, {k}] consume",
    "distance_unit": "m",
    "slots": [
      {"name": "subject", "kind": "table", "role": "subject", "geometry_constraint": "any"},
      {"name": "anchor", "kind": "entity", "role": "object", "geometry_constraint": "point", "render": "point"},
      {"name": "k", "kind": "count"}
    ]
  },
  {
    "id": "knn_point_sites",
    "query_type": "knn",
    "nl": "Which {k} {subject} sites are nearest to {anchor}?",
    "exe": "query {subject} feed distancescan[{anchor}, {k}] consume",
    "distance_unit": "m",
    "slots": [
      {"name": "subject", "kind": "table", "role": "subject", "geometry_constraint": "point", "plural": false},
      {"name": "anchor", "kind": "entity", "role": "object", "geometry_constraint": "point", "render": "point"},
      {"name": "k", "kind": "count"}
    ]
  },
  {
    "id": "join_intersect_any",
    "query_type": "spatial_join",
    "nl": "Which {left} intersect a {right}?",
    "exe": "query {left} feed symmjoin[.geom intersects ..geom] {right} feed consume",
    "distance_unit": "m",
    "slots": [
      {"name": "left", "kind": "table", "role": "relation1", "geometry_constraint": "any"},
      {"name": "right", "kind": "table", "role": "relation2", "geometry_constraint": "any", "plural": false}
    ]
  },
  {
    "id": "join_intersect_pairs",
    "query_type": "spatial_join",
    "nl": "Find all pairs of {left} and {right} that intersect.",
    "exe": "query {left} feed symmjoin[.geom intersects ..geom] {right} feed consume",
    "distance_unit": "m",
    "slots": [
      {"name": "left", "kind": "table", "role": "relation1", "geometry_constraint": "any"},
      {"name": "right", "kind": "table", "role": "relation2", "geometry_constraint": "any"}
    ]
  },
  {
    "id": "join_line_crossing",
    "query_type": "spatial_join",
    "nl": "Which {left} cross a {right}?",
    "exe": "query {left} feed symmjoin[.geom intersects ..geom] {right} feed consume",
    "distance_unit": "m",
    "slots": [
      {"name": "left", "kind": "table", "role": "relation1", "geometry_constraint": "line"},
      {"name": "right", "kind": "table", "role": "relation2", "geometry_constraint": "line", "plural": false}
    ]
  },
  {
    "id": "djoin_within_km",
    "query_type": "distance_join",
    "nl": "Which {left} are within {distance} of a {right}?",
    "exe": "query {left} feed symmjoin[distance(.geom, ..geom) < {distance}] {right} feed consume",
    "distance_unit": "km",
    "slots": [
      {"name": "left", "kind": "table", "role": "relation1", "geometry_constraint": "any"},
      {"name": "right", "kind": "table", "role": "relation2", "geometry_constraint": "any", "plural": false},
      {"name": "distance", "kind": "distance", "unit": "km"}
    ]
  },
  {
    "id": "djoin_pairs_m",
    "query_type": "distance_join",
    "nl": "Find pairs of {left} and {right} less than {distance} apart.",
    "exe": "query {left} feed symmjoin[distance(.geom, ..geom) < {distance}] {right} feed consume",
    "distance_unit": "m",
    "slots": [
      {"name": "left", "kind": "table", "role": "relation1", "geometry_constraint": "any"},
      {"name": "right", "kind": "table", "role": "relation2", "geometry_constraint": "any"},
      {"name": "distance", "kind": "distance", "unit": "m"}
    ]
  },
  {
    "id": "djoin_closer_than",
    "query_type": "distance_join",
    "nl": "List the {left} that have a {right} closer than {distance}.",
    "exe": "query {left} feed symmjoin[distance(.geom, ..geom) < {distance}] {right} feed consume",
    "distance_unit": "km",
    "slots": [
      {"name": "left", "kind": "table", "role": "relation1", "geometry_constraint": "any"},
      {"name": "right", "kind": "table", "role": "relation2", "geometry_constraint": "any", "plural": false},
      {"name": "distance", "kind": "distance", "unit": "km"}
    ]
  },
  {
    "id": "agg_count_in_region",
    "query_type": "aggregation",
    "nl": "How many {subject} are inside {region}?",
    "exe": "query {subject} feed filter[.geom inside ref({region})] count",
    "distance_unit": "m",
    "slots": [
      {"name": "subject", "kind": "table", "role": "relation1", "geometry_constraint": "any"},
      {"name": "region", "kind": "entity", "role": "witness_object", "geometry_constraint": "region"}
    ]
  },
  {
    "id": "agg_count_located",
    "query_type": "aggregation",
    "nl": "Count the {subject} located within {region}.",
    "exe": "query {subject} feed filter[.geom inside ref({region})] count",
    "distance_unit": "m",
    "slots": [
      {"name": "subject", "kind": "table", "role": "relation1", "geometry_constraint": "any"},
      {"name": "region", "kind": "entity", "role": "witness_object", "geometry_constraint": "region"}
    ]
  },
  {
    "id": "agg_count_pairs",
    "query_type": "aggregation",
    "nl": "How many pairs of {subject} and {regions} intersect?",
    "exe": "query {subject} feed symmjoin[.geom intersects ..geom] {regions} feed count",
    "distance_unit": "m",
    "slots": [
      {"name": "subject", "kind": "table", "role": "relation1", "geometry_constraint": "any"},
      {"name": "regions", "kind": "table", "role": "relation2", "geometry_constraint": "region"}
    ]
  }
])json";
  return kJson;
}

const TemplateLibrary& default_templates() {
  static const TemplateLibrary lib = parse_templates(default_templates_json(), "default templates");
  return lib;
}

}  // namespace sscc
