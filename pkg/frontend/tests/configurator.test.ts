import { beforeEach, describe, expect, it } from "vitest";

import { buildConfig, renderConfigurator } from "../src/components/configurator.js";
import type { ExampleDetail, PackageConfig } from "../src/types.js";
import { AIRFOIL_DETAIL, GLYPHS_DETAIL } from "./mock-api.js";

function render(
  detail: ExampleDetail,
  onDownload: (slug: string, config: PackageConfig) => void = () => undefined,
): HTMLElement {
  const container = document.createElement("div");
  document.body.append(container);
  renderConfigurator(container, detail, { onDownload });
  return container;
}

beforeEach(() => {
  document.body.innerHTML = "";
});

describe("package configurator", () => {
  it("disables MPI and Slurm for an example without those capabilities", () => {
    const container = render(AIRFOIL_DETAIL);
    expect(AIRFOIL_DETAIL.capabilities.mpi).toBe(false);
    expect(container.querySelector('option[value="mpi"]')!.hasAttribute("disabled")).toBe(true);
    expect(container.querySelector('option[value="slurm"]')!.hasAttribute("disabled")).toBe(true);
    expect(container.querySelector('option[value="local"]')!.hasAttribute("disabled")).toBe(false);
  });

  it("offers every mode for a fully capable example", () => {
    const container = render(GLYPHS_DETAIL);
    for (const mode of ["local", "mpi", "slurm"]) {
      expect(container.querySelector(`option[value="${mode}"]`)!.hasAttribute("disabled")).toBe(
        false,
      );
    }
  });

  it("disables the dataset input when the dataset is not replaceable", () => {
    const fixed = {
      ...GLYPHS_DETAIL,
      capabilities: { ...GLYPHS_DETAIL.capabilities, dataset_replaceable: false },
    };
    const container = render(fixed);
    expect(container.querySelector('input[name="dataset_path"]')!.hasAttribute("disabled")).toBe(
      true,
    );
  });

  it("shows Slurm fields only in Slurm mode, with walltime required", () => {
    const container = render(GLYPHS_DETAIL);
    const fields = container.querySelector<HTMLElement>(".slurm-fields")!;
    const walltime = container.querySelector<HTMLInputElement>('input[name="slurm_walltime"]')!;
    expect(fields.style.display).toBe("none");
    expect(walltime.hasAttribute("required")).toBe(false);

    const mode = container.querySelector<HTMLSelectElement>('select[name="mode"]')!;
    mode.value = "slurm";
    mode.dispatchEvent(new Event("change"));
    expect(fields.style.display).toBe("");
    expect(walltime.hasAttribute("required")).toBe(true);

    mode.value = "local";
    mode.dispatchEvent(new Event("change"));
    expect(fields.style.display).toBe("none");
    expect(walltime.hasAttribute("required")).toBe(false);
  });

  it("submits the exact config the form describes", () => {
    const configs: PackageConfig[] = [];
    const container = render(GLYPHS_DETAIL, (_slug, config) => configs.push(config));
    const form = container.querySelector<HTMLFormElement>("form")!;

    (form.querySelector('select[name="mode"]') as HTMLSelectElement).value = "mpi";
    form.querySelector('select[name="mode"]')!.dispatchEvent(new Event("change"));
    (form.querySelector('input[name="ranks"]') as HTMLInputElement).value = "8";
    (form.querySelector('input[name="dataset_path"]') as HTMLInputElement).value = "/scratch/me";
    (form.querySelector('select[name="pull_policy"]') as HTMLSelectElement).value = "always";

    form.dispatchEvent(new Event("submit", { bubbles: true, cancelable: true }));
    expect(configs).toEqual([
      {
        runtime: "docker",
        mode: "mpi",
        dataset_path: "/scratch/me",
        ranks: 8,
        slurm: null,
        pull_policy: "always",
      },
    ]);
  });

  it("builds a full Slurm config", () => {
    const container = render(GLYPHS_DETAIL);
    const form = container.querySelector<HTMLFormElement>("form")!;
    (form.querySelector('select[name="runtime"]') as HTMLSelectElement).value = "apptainer";
    (form.querySelector('select[name="mode"]') as HTMLSelectElement).value = "slurm";
    (form.querySelector('input[name="slurm_partition"]') as HTMLInputElement).value = "batch";
    (form.querySelector('input[name="slurm_nodes"]') as HTMLInputElement).value = "2";
    (form.querySelector('input[name="slurm_tasks_per_node"]') as HTMLInputElement).value = "4";
    (form.querySelector('input[name="slurm_walltime"]') as HTMLInputElement).value = "00:30:00";

    const config = buildConfig(form);
    expect(config).toEqual({
      runtime: "apptainer",
      mode: "slurm",
      dataset_path: null,
      ranks: null,
      slurm: {
        partition: "batch",
        nodes: 2,
        tasks_per_node: 4,
        walltime: "00:30:00",
        account: null,
        extra_directives: [],
      },
      pull_policy: "if-absent",
    });
  });
});
