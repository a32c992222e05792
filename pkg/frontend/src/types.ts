// Wire types of the catalog API. Field names mirror the JSON bodies.

export type TagCategory = "DataType" | "Technique" | "Domain";

export interface TagRef {
  name: string;
  category: TagCategory;
}

export interface TagInfo extends TagRef {
  count: number;
}

export interface SearchItem {
  slug: string;
  title: string;
  tags: TagRef[];
  first_image: string | null;
  score: number;
}

export interface SearchResult {
  total: number;
  items: SearchItem[];
}

export interface Capabilities {
  preview: boolean;
  mpi: boolean;
  slurm: boolean;
  dataset_replaceable: boolean;
}

export type SectionId =
  | "description"
  | "instructions"
  | "limitations"
  | "references"
  | "resources";

export const SECTION_IDS: SectionId[] = [
  "description",
  "instructions",
  "limitations",
  "references",
  "resources",
];

export interface ContainerRef {
  image: string;
  entrypoint: string[];
  recipe: string | null;
}

export interface ExampleDetail {
  slug: string;
  title: string;
  authors: string[];
  added: string;
  tags: TagRef[];
  capabilities: Capabilities;
  container: ContainerRef;
  single_task: boolean;
  issue_url: string | null;
  sections: Record<SectionId, string>;
  images: string[];
  resources: string | null;
}

export type RuntimeName = "docker" | "apptainer";
export type ModeName = "local" | "mpi" | "slurm";
export type PullPolicyName = "if-absent" | "always";

export interface SlurmParams {
  partition: string;
  nodes: number;
  tasks_per_node: number;
  walltime: string;
  account: string | null;
  extra_directives: string[];
}

export interface PackageConfig {
  runtime: RuntimeName;
  mode: ModeName;
  dataset_path: string | null;
  ranks: number | null;
  slurm: SlurmParams | null;
  pull_policy: PullPolicyName;
}

export interface ApiErrorBody {
  status: number;
  code: string;
  message: string;
}

export type CapabilityFlag = keyof Capabilities;

export const CAPABILITY_FLAGS: CapabilityFlag[] = [
  "preview",
  "mpi",
  "slurm",
  "dataset_replaceable",
];

export const SORT_KEYS = ["relevance", "date-desc", "date-asc", "title-asc"] as const;
export type SortKey = (typeof SORT_KEYS)[number];
