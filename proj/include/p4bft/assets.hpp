#pragma once

// Embedded copies of assets/topologies/*. tests/test_topology.cpp checks they
// stay byte-identical to the files.

#include <string_view>

#include "p4bft/topology.hpp"

namespace p4bft {

namespace assets {

inline constexpr std::string_view kFig2Edges = R"(# Five-switch example network with two controller clusters.
S1 S2
S2 S3
S1 S4
S4 S5
S2 S4
S3 S5
)";

inline constexpr std::string_view kFig2Attachments = R"(# Cluster 1 behind S1, cluster 2 behind S3.
C1 S1
C2 S1
C3 S3
C4 S3
C5 S3
)";

inline constexpr std::string_view kInternet2Edges = R"(# Internet2 layer-2 research backbone, 34 PoPs / 43 links (v1).
# Reconstructed from public Internet2 network maps of the OS3E era;
# long-haul links only, unit weight. Switch names are PoP cities.
Seattle Portland
Seattle Missoula
Portland Sunnyvale
Portland SaltLakeCity
Sunnyvale LosAngeles
Sunnyvale SaltLakeCity
LosAngeles Tucson
Tucson Phoenix
Phoenix Albuquerque
Tucson ElPaso
ElPaso Albuquerque
Albuquerque Denver
SaltLakeCity Denver
Missoula Minneapolis
Missoula SaltLakeCity
Denver KansasCity
KansasCity Tulsa
Tulsa Dallas
Dallas Houston
ElPaso Houston
Houston BatonRouge
BatonRouge Jackson
Jackson Memphis
Memphis Nashville
Jackson Atlanta
Nashville Atlanta
Nashville Louisville
Louisville Indianapolis
Indianapolis Chicago
KansasCity Chicago
Minneapolis Chicago
Chicago Cleveland
Cleveland Pittsburgh
Cleveland Buffalo
Buffalo Boston
Boston NewYork
NewYork Philadelphia
Philadelphia Ashburn
Pittsburgh Ashburn
Ashburn Raleigh
Raleigh Charlotte
Charlotte Atlanta
Atlanta Jacksonville
)";

}  // namespace assets

/// Five switches, controllers C1,C2 behind S1 and C3..C5 behind S3.
inline Topology fig2_topology() {
  return topology_from_text(assets::kFig2Edges, assets::kFig2Attachments);
}

/// The embedded Internet2 backbone, without controllers.
inline Topology internet2() { return topology_from_text(assets::kInternet2Edges); }

}  // namespace p4bft
