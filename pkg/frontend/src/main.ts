import { mountPanel } from "./panel.js";

mountPanel();
