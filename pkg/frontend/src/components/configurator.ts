// Package configurator: runtime, execution mode, ranks, Slurm parameters,
// dataset path. Options an example's capabilities forbid are disabled, so
// the form can only submit configurations the server will accept.

import { clear, el } from "../dom.js";
import type { ExampleDetail, ModeName, PackageConfig, PullPolicyName, RuntimeName } from "../types.js";

export interface ConfiguratorCallbacks {
  onDownload: (slug: string, config: PackageConfig) => void;
}

export function buildConfig(form: HTMLFormElement): PackageConfig {
  const data = new FormData(form);
  const mode = data.get("mode") as ModeName;
  const ranksRaw = (data.get("ranks") as string | null)?.trim() ?? "";
  const dataset = (data.get("dataset_path") as string | null)?.trim() ?? "";
  const account = (data.get("slurm_account") as string | null)?.trim() ?? "";
  return {
    runtime: data.get("runtime") as RuntimeName,
    mode,
    dataset_path: dataset || null,
    ranks: mode === "mpi" && ranksRaw ? Number.parseInt(ranksRaw, 10) : null,
    slurm:
      mode === "slurm"
        ? {
            partition: (data.get("slurm_partition") as string).trim(),
            nodes: Number.parseInt(data.get("slurm_nodes") as string, 10),
            tasks_per_node: Number.parseInt(data.get("slurm_tasks_per_node") as string, 10),
            walltime: (data.get("slurm_walltime") as string).trim(),
            account: account || null,
            extra_directives: [],
          }
        : null,
    pull_policy: (data.get("pull_policy") as PullPolicyName) ?? "if-absent",
  };
}

export function renderConfigurator(
  container: HTMLElement,
  detail: ExampleDetail,
  callbacks: ConfiguratorCallbacks,
): void {
  clear(container);
  const caps = detail.capabilities;
  const form = el("form", { className: "configurator" }) as HTMLFormElement;
  form.append(el("h2", {}, ["Configure & download"]));

  const runtimeField = el("label", { className: "field" }, ["Container runtime"]);
  const runtimeSelect = el("select", { name: "runtime" }) as HTMLSelectElement;
  runtimeSelect.append(el("option", { value: "docker" }, ["Docker"]));
  runtimeSelect.append(el("option", { value: "apptainer" }, ["Apptainer"]));
  runtimeField.append(runtimeSelect);
  form.append(runtimeField);

  const modeField = el("label", { className: "field" }, ["Execution mode"]);
  const modeSelect = el("select", { name: "mode" }) as HTMLSelectElement;
  const local = el("option", { value: "local" }, ["Local"]);
  const mpi = el("option", { value: "mpi" }, ["MPI"]);
  const slurm = el("option", { value: "slurm" }, ["Slurm"]);
  if (!caps.mpi) mpi.setAttribute("disabled", "");
  if (!caps.slurm) slurm.setAttribute("disabled", "");
  modeSelect.append(local, mpi, slurm);
  modeField.append(modeSelect);
  form.append(modeField);

  const ranksField = el("label", { className: "field field-ranks" }, ["MPI ranks"]);
  const ranksInput = el("input", {
    type: "number",
    name: "ranks",
    min: "1",
    value: "4",
  }) as HTMLInputElement;
  ranksField.append(ranksInput);
  form.append(ranksField);

  const slurmFields = el("fieldset", { className: "slurm-fields" });
  slurmFields.append(el("legend", {}, ["Slurm job"]));
  const partition = el("input", { type: "text", name: "slurm_partition", required: true }) as HTMLInputElement;
  const nodes = el("input", { type: "number", name: "slurm_nodes", min: "1", value: "1", required: true }) as HTMLInputElement;
  const tasks = el("input", { type: "number", name: "slurm_tasks_per_node", min: "1", value: "1", required: true }) as HTMLInputElement;
  const walltime = el("input", {
    type: "text",
    name: "slurm_walltime",
    placeholder: "HH:MM:SS",
    pattern: "\\d{1,4}:\\d{2}:\\d{2}",
    required: true,
  }) as HTMLInputElement;
  const accountInput = el("input", { type: "text", name: "slurm_account" }) as HTMLInputElement;
  slurmFields.append(
    el("label", { className: "field" }, ["Partition", partition]),
    el("label", { className: "field" }, ["Nodes", nodes]),
    el("label", { className: "field" }, ["Tasks per node", tasks]),
    el("label", { className: "field" }, ["Walltime", walltime]),
    el("label", { className: "field" }, ["Account (optional)", accountInput]),
  );
  form.append(slurmFields);

  const datasetField = el("label", { className: "field" }, ["Own dataset path (on the target machine)"]);
  const datasetInput = el("input", {
    type: "text",
    name: "dataset_path",
    placeholder: "/path/to/your/data",
  }) as HTMLInputElement;
  if (!caps.dataset_replaceable) {
    datasetInput.setAttribute("disabled", "");
    datasetField.append(datasetInput, el("small", {}, ["This example ships its own dataset."]));
  } else {
    datasetField.append(datasetInput);
  }
  form.append(datasetField);

  const pullField = el("label", { className: "field" }, ["Image pull policy"]);
  const pullSelect = el("select", { name: "pull_policy" }) as HTMLSelectElement;
  pullSelect.append(el("option", { value: "if-absent" }, ["Pull if absent"]));
  pullSelect.append(el("option", { value: "always" }, ["Always pull"]));
  pullField.append(pullSelect);
  form.append(pullField);

  const submit = el("button", { type: "submit", className: "download-button" }, [
    "Download run bundle",
  ]);
  form.append(submit);
  const status = el("p", { className: "configurator-status", role: "status" });
  form.append(status);

  const syncVisibility = () => {
    const mode = modeSelect.value as ModeName;
    ranksField.style.display = mode === "mpi" ? "" : "none";
    slurmFields.style.display = mode === "slurm" ? "" : "none";
    for (const input of [partition, nodes, tasks, walltime]) {
      if (mode === "slurm") input.setAttribute("required", "");
      else input.removeAttribute("required");
    }
  };
  modeSelect.addEventListener("change", syncVisibility);
  syncVisibility();

  form.addEventListener("submit", (ev) => {
    ev.preventDefault();
    status.textContent = "";
    callbacks.onDownload(detail.slug, buildConfig(form));
  });

  container.append(form);
}
